use std::f64::consts::LN_2;

use carmarkov::car::{build_fock, regional_subalgebra, twisted_subalgebra, Region, Subalgebra};
use carmarkov::entropy::{entropy_hat, entropy_vn, relative_entropy, ssa_residual};
use carmarkov::linalg::hermitian_eig;
use carmarkov::markov::{
    counterexample_with_b, even_markov_state, markov_report, COUNTEREXAMPLE_COMPONENTS,
};
use carmarkov::separability::{
    certify, hopping_witness, jw_twist_image, ppt_min_eigenvalue, product_check,
    verify_decomposition, PairLabel,
};
use carmarkov::states::{
    product_extension, random_state, restrict, StateDensity, StateKind, Triple,
};
use carmarkov::{FockRep, Result};
use rayon::prelude::*;

use crate::{Assertion, NamedMatrix, Report, Scenario, ScenarioConfig};

pub(crate) fn run(config: &ScenarioConfig) -> Result<Report> {
    let assertions = match config.scenario {
        Scenario::SsaSweep => ssa_sweep(config)?,
        Scenario::CommutingSquare => commuting_square(config)?,
        Scenario::MarkovEquivalence => markov_equivalence(config)?,
        Scenario::Counterexample => return counterexample(config),
        Scenario::AdditivityProduct => additivity_product(config)?,
        Scenario::EntropyIdentities => entropy_identities(config)?,
    };
    Ok(Report {
        assertions,
        ..Report::new(config)
    })
}

fn trial_seed(config: &ScenarioConfig, trial: usize) -> u64 {
    config
        .seed
        .wrapping_mul(0x9e37_79b9_7f4a_7c15)
        .wrapping_add(trial as u64)
}

fn regions(modes: &[usize]) -> Vec<Region> {
    let mut start = 0;
    modes
        .iter()
        .map(|&n| {
            let r = Region::span(start, n);
            start += n;
            r
        })
        .collect()
}

fn setup(config: &ScenarioConfig) -> Result<(FockRep, Vec<Region>)> {
    let rep = build_fock(config.modes.iter().sum())?;
    Ok((rep, regions(&config.modes)))
}

fn trials<T, F>(config: &ScenarioConfig, f: F) -> Result<Vec<T>>
where
    T: Send,
    F: Fn(usize, u64) -> Result<T> + Sync,
{
    (0..config.trials)
        .into_par_iter()
        .map(|i| f(i, trial_seed(config, i)))
        .collect()
}

fn max(values: impl IntoIterator<Item = f64>) -> f64 {
    values.into_iter().fold(0.0, f64::max)
}

fn flag(b: bool) -> f64 {
    if b {
        1.0
    } else {
        0.0
    }
}

fn ssa_sweep(config: &ScenarioConfig) -> Result<Vec<Assertion>> {
    let (rep, r) = setup(config)?;
    let triple = Triple::regional(&rep, &r[0], &r[1], &r[2])?;
    triple.require_commuting_square()?;
    let kinds = [
        StateKind::General,
        StateKind::Even,
        StateKind::GaugeInvariant,
    ];
    let residuals = trials(config, |i, seed| {
        let psi = random_state(&rep, kinds[i % kinds.len()], seed);
        Ok(ssa_residual(&psi, &triple)?.residual)
    })?;
    let worst = residuals.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    Ok(vec![Assertion::at_most(
        "max_ssa_residual",
        worst,
        config.tol.unwrap_or(1e-9),
    )])
}

fn commuting_square(config: &ScenarioConfig) -> Result<Vec<Assertion>> {
    let (rep, r) = setup(config)?;
    let tol = config.tol.unwrap_or(1e-10);
    let names = [
        "restriction_ab",
        "restriction_bc",
        "intersection",
        "product_ab_bc",
        "product_bc_ab",
    ];
    let mut out = Vec::new();
    for (prefix, triple) in [
        ("regional", Triple::regional(&rep, &r[0], &r[1], &r[2])?),
        ("twisted", Triple::twisted(&rep, &r[0], &r[1], &r[2])?),
    ] {
        let residuals = triple.report()?.residuals();
        for (name, value) in names.iter().zip(residuals) {
            out.push(Assertion::at_most(&format!("{prefix}_{name}"), value, tol));
        }
    }
    Ok(out)
}

fn markov_equivalence(config: &ScenarioConfig) -> Result<Vec<Assertion>> {
    let (rep, r) = setup(config)?;
    let triple = Triple::regional(&rep, &r[0], &r[1], &r[2])?;
    triple.require_commuting_square()?;
    let ab = regional_subalgebra(&rep, &r[0].union(&r[1]))?;
    let c = regional_subalgebra(&rep, &r[2])?;
    let reports = trials(config, |i, seed| {
        let (psi, markov) = match i % 3 {
            0 => (random_state(&rep, StateKind::Even, seed), false),
            1 => (even_markov_state(&rep, &r[0], &r[1], &r[2], seed)?, true),
            _ => {
                let left = random_state(&rep, StateKind::Even, seed);
                let right = random_state(&rep, StateKind::Even, seed ^ 1);
                (product_extension(&rep, &left, &ab, &right, &c)?, true)
            }
        };
        Ok((markov_report(&rep, &psi, &triple)?, markov))
    })?;
    let splits = reports.iter().filter(|(m, _)| !m.consistent()).count();
    let unexpected = reports
        .iter()
        .filter(|(m, markov)| m.verdict != *markov)
        .count();
    let odd = max(reports.iter().map(|(m, _)| m.odd_part_norm));
    let fixed = max(reports
        .iter()
        .filter(|(m, _)| m.verdict)
        .map(|(m, _)| m.fixed_point_error));
    let identity = max(reports.iter().map(|(m, _)| m.t_sharp_identity_residual));
    Ok(vec![
        Assertion::at_most("split_verdicts", splits as f64, 0.0),
        Assertion::at_most("unexpected_verdicts", unexpected as f64, 0.0),
        Assertion::at_most("max_odd_part_norm", odd, 1e-10),
        Assertion::at_most("max_fixed_point_error", fixed, config.tol.unwrap_or(1e-8)),
        Assertion::at_most("max_t_sharp_identity_residual", identity, 1e-9),
    ])
}

fn counterexample(config: &ScenarioConfig) -> Result<Report> {
    let lambda = config.lambda;
    let tol = config.tol.unwrap_or(1e-8);
    let ce = counterexample_with_b(lambda, config.modes[1])?;
    let twisted_triple = ce.twisted_triple()?;
    let regional_triple = ce.regional_triple()?;
    let twisted = markov_report(&ce.rep, &ce.omega, &twisted_triple)?;
    let regional = ssa_residual(&ce.omega, &regional_triple)?.residual;

    let ac = ce.ac_algebra()?;
    let marginal = restrict(&ce.omega, &ac);
    let marginal_error = (marginal.rho() - ce.rho_lambda.rho()).tau_norm();
    let witness = hopping_witness(&marginal, &ce.hopping);
    let image = jw_twist_image(&ce.rep, &marginal, &ce.a, &ce.c)?;
    let ppt = ppt_min_eigenvalue(&image, 2, 2)?;
    let cert = certify(
        &ce,
        PairLabel::Twisted {
            a: ce.a.clone(),
            c: ce.c.clone(),
        },
    )?;
    let decomposition = verify_decomposition(&ce.rep, &cert, &ce.omega).unwrap_or(false)
        && cert.decomposition.as_ref().map(Vec::len) == Some(COUNTEREXAMPLE_COMPONENTS);

    let gaps = trials(config, |_, seed| {
        let psi = random_state(&ce.rep, StateKind::Even, seed);
        let r1 = ssa_residual(&psi, &regional_triple)?.residual;
        let r2 = ssa_residual(&psi, &twisted_triple)?.residual;
        Ok((r1 - r2).abs())
    })?;

    let assertions = vec![
        Assertion::at_most("twisted_ssa_residual_abs", twisted.ssa_residual.abs(), tol),
        Assertion::at_most("twisted_recovery_error", twisted.recovery_error, tol),
        Assertion::at_most("regional_ssa_residual", regional, 1e-9),
        Assertion::at_most("marginal_error", marginal_error, 1e-10),
        Assertion::at_least("hopping_witness", witness, 1e-12),
        Assertion::at_most(
            "hopping_witness_deviation",
            (witness - lambda / 8.0).abs(),
            1e-10,
        ),
        Assertion::at_least("ppt_min_eigenvalue", ppt, 0.0),
        Assertion::at_most(
            "ppt_min_eigenvalue_deviation",
            (ppt - (1.0 - lambda / 2.0) / 4.0).abs(),
            1e-10,
        ),
        Assertion::at_least("decomposition_verified", flag(decomposition), 1.0),
        Assertion::at_most("even_regional_twisted_gap", max(gaps), 1e-9),
    ];
    Ok(Report {
        assertions,
        matrices: Some(vec![
            NamedMatrix {
                name: "rho_lambda".into(),
                matrix: ac.local_image(ce.rho_lambda.rho()),
            },
            NamedMatrix {
                name: "jw_twist_image".into(),
                matrix: image,
            },
        ]),
        ..Report::new(config)
    })
}

fn additivity_product(config: &ScenarioConfig) -> Result<Vec<Assertion>> {
    let (rep, r) = setup(config)?;
    let (a, c) = (&r[0], &r[1]);
    let a_alg = regional_subalgebra(&rep, a)?;
    let c_alg = regional_subalgebra(&rep, c)?;
    let checks = trials(config, |i, seed| {
        let psi = match i % 5 {
            0 => {
                let even = random_state(&rep, StateKind::Even, seed);
                let general = random_state(&rep, StateKind::General, seed ^ 1);
                product_extension(&rep, &even, &a_alg, &general, &c_alg)?
            }
            1 => {
                let general = random_state(&rep, StateKind::General, seed);
                let even = random_state(&rep, StateKind::Even, seed ^ 1);
                product_extension(&rep, &general, &a_alg, &even, &c_alg)?
            }
            2 => random_state(&rep, StateKind::General, seed),
            3 => random_state(&rep, StateKind::Even, seed),
            _ => random_state(&rep, StateKind::GaugeInvariant, seed),
        };
        product_check(&rep, &psi, a, c)
    })?;
    let tol = config.tol.unwrap_or(1e-8);
    let additive: Vec<_> = checks
        .iter()
        .filter(|ch| ch.additivity_residual.abs() <= tol)
        .collect();
    let splits = checks
        .iter()
        .filter(|ch| (ch.additivity_residual.abs() <= tol) != ch.is_product)
        .count();
    let odd = max(additive
        .iter()
        .map(|ch| ch.analysis.odd_norm_a.min(ch.analysis.odd_norm_c)));
    let equations = max(additive.iter().map(|ch| {
        let an = &ch.analysis;
        an.even_equation
            .max(an.odd_equation_a)
            .max(an.odd_equation_c)
    }));
    Ok(vec![
        Assertion::at_most("split_verdicts", splits as f64, 0.0),
        Assertion::at_least("additive_states", additive.len() as f64, 1.0),
        Assertion::at_most("max_min_odd_norm", odd, 1e-6),
        Assertion::at_most("max_equation_residual", equations, 1e-6),
    ])
}

fn local_entropy_hat(alg: &Subalgebra, phi: &StateDensity) -> Result<f64> {
    let local = alg.local_image(phi.rho());
    let d = local.dim() as f64;
    let eig = hermitian_eig(&local)?;
    Ok(-eig
        .eigenvalues
        .iter()
        .filter(|&&l| l > 0.0)
        .map(|&l| l * l.ln())
        .sum::<f64>()
        / d)
}

fn entropy_identities(config: &ScenarioConfig) -> Result<Vec<Assertion>> {
    let (rep, r) = setup(config)?;
    let n = rep.n_modes() as f64;
    let subalgebras = [
        regional_subalgebra(&rep, &r[1])?,
        regional_subalgebra(&rep, &r[0].union(&r[2]))?,
        twisted_subalgebra(&rep, &r[1].union(&r[2]), &r[0])?,
    ];
    let rows = trials(config, |i, seed| {
        let phi = random_state(&rep, StateKind::ALL[i % StateKind::ALL.len()], seed);
        let b = &subalgebras[i % subalgebras.len()];
        let phi_b = restrict(&phi, b);
        let d = b.factor_dim() as f64;
        let offset = (entropy_vn(&phi) - entropy_hat(&phi) - n * LN_2)
            .abs()
            .max((entropy_vn(&phi_b) - entropy_hat(&phi_b) - d.ln()).abs());
        let relative = match relative_entropy(&phi, &phi_b)?.finite() {
            Some(h) => (entropy_hat(&phi_b) - entropy_hat(&phi) - h).abs(),
            None => f64::INFINITY,
        };
        let local = (local_entropy_hat(b, &phi_b)? - entropy_hat(&phi_b)).abs();
        Ok([offset, relative, local])
    })?;
    let tol = config.tol.unwrap_or(1e-9);
    Ok(vec![
        Assertion::at_most("entropy_offset", max(rows.iter().map(|x| x[0])), tol),
        Assertion::at_most(
            "relative_entropy_identity",
            max(rows.iter().map(|x| x[1])),
            tol,
        ),
        Assertion::at_most("restriction_identity", max(rows.iter().map(|x| x[2])), tol),
    ])
}
