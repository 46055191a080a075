//! Fixtures shared by the benchmarks.

use carmarkov::car::{build_fock, Region};
use carmarkov::states::{random_state, StateDensity, StateKind, Triple};
use carmarkov::FockRep;

/// Regional triple on `na + nb + nc` modes with a random even state.
pub fn triple_fixture(
    na: usize,
    nb: usize,
    nc: usize,
    seed: u64,
) -> (FockRep, Triple, StateDensity) {
    let rep = build_fock(na + nb + nc).expect("mode count within range");
    let triple = Triple::regional(
        &rep,
        &Region::span(0, na),
        &Region::span(na, nb),
        &Region::span(na + nb, nc),
    )
    .expect("disjoint regions");
    triple.report().expect("commuting square");
    let psi = random_state(&rep, StateKind::Even, seed);
    (rep, triple, psi)
}
