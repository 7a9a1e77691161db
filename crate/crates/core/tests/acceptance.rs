//! Acceptance suite: one test per criterion, each printing a pass/fail line.
//! Run with `cargo test -p dunklosc --test acceptance -- --nocapture` to see
//! every line.

use std::sync::OnceLock;

use dunklosc::params::{ExtensionSpec, ExtensionType, Parameters, QuantumNumbers, SectorLabel};
use dunklosc::radial_ext::extended_radial_state;
use dunklosc::suite::{run_full_suite, SuiteBundle, SuiteConfig};
use dunklosc::verify::{identity_deviation, radial_gram, VerificationReport};

fn bundle() -> &'static SuiteBundle {
    static BUNDLE: OnceLock<SuiteBundle> = OnceLock::new();
    BUNDLE.get_or_init(|| {
        let p = Parameters::new(0.3, 0.7).unwrap();
        run_full_suite(&p, &SuiteConfig::default()).unwrap()
    })
}

fn check(name: &str) -> &'static VerificationReport {
    bundle()
        .checks
        .iter()
        .find(|c| c.check == name)
        .unwrap_or_else(|| panic!("missing check {name}"))
}

/// Assert the named suite checks pass and report the worst margin.
fn require(criterion: &str, names: &[&str]) {
    let mut worst: Option<&VerificationReport> = None;
    let mut all_pass = true;
    for name in names {
        let c = check(name);
        all_pass &= c.pass;
        let margin = |r: &VerificationReport| {
            if r.tolerance > 0.0 {
                r.deviation / r.tolerance
            } else {
                r.deviation
            }
        };
        if worst.map_or(true, |w| margin(c) > margin(w)) {
            worst = Some(c);
        }
    }
    let w = worst.expect("at least one check");
    println!(
        "{} {criterion}: worst {} deviation {:.3e} (tolerance {:.1e})",
        if all_pass { "PASS" } else { "FAIL" },
        w.check,
        w.deviation,
        w.tolerance
    );
    assert!(all_pass, "{criterion} failed on {}", w.check);
}

#[test]
fn criterion_1_base_orthonormality() {
    require(
        "criterion 1 (base orthonormality)",
        &["base_angular_gram", "base_radial_gram"],
    );
}

#[test]
fn criterion_2_base_eigen_residuals() {
    require(
        "criterion 2 (base eigen-residuals, FD oracle, convergence order)",
        &[
            "base_residual_radial",
            "base_residual_angular",
            "base_fd_residual",
            "fd_convergence_order",
        ],
    );
}

#[test]
fn criterion_3_closed_form_crosscheck() {
    require(
        "criterion 3 (m=1 closed-form potential crosscheck)",
        &["ext_radial_m1_crosscheck"],
    );
}

#[test]
fn criterion_4_isospectrality() {
    require(
        "criterion 4 (isospectrality, type III extra level, grid oracle)",
        &[
            "ext_radial_isospectral_I",
            "ext_radial_isospectral_II",
            "ext_radial_type3_extra_level",
            "grid_spectrum_I1",
            "grid_spectrum_II1",
            "grid_spectrum_III2",
            "grid_spectrum_base",
        ],
    );
}

#[test]
fn criterion_5_extended_radial_orthonormality() {
    // first (n, mu) choices are covered by the suite bundle at (0.3, 0.7);
    // the criterion asks for a second admissible pair per spec type.
    let p2 = Parameters::new(0.25, 0.6).unwrap();
    let mut dev: f64 = 0.0;
    for (tau, m) in [
        (ExtensionType::I, 1u32),
        (ExtensionType::I, 2),
        (ExtensionType::II, 1),
        (ExtensionType::III, 2),
    ] {
        let spec = ExtensionSpec::new(tau, m).unwrap();
        for n2 in [2u32, 3] {
            let ks: Vec<u32> = (0..=(m + 5)).filter(|&k| spec.admits_k(k)).collect();
            let forms: Vec<_> = ks
                .iter()
                .map(|&k| {
                    extended_radial_state(spec, k, n2, &p2)
                        .unwrap()
                        .form()
                        .clone()
                })
                .collect();
            let gram = radial_gram(&forms, &p2, 800).unwrap();
            dev = dev.max(identity_deviation(&gram));
        }
    }
    let first = check("ext_radial_gram");
    let pass = first.pass && dev <= 1e-9;
    println!(
        "{} criterion 5 (extended radial orthonormality): deviations {:.3e} / {:.3e} (tolerance 1.0e-9)",
        if pass { "PASS" } else { "FAIL" },
        first.deviation,
        dev
    );
    assert!(pass);
}

#[test]
fn criterion_6_operator_triangle() {
    require(
        "criterion 6 (H_ext operator-form triangle, K-term identities)",
        &[
            "hext_operator_triangle",
            "k_term_cartesian_forms",
            "k_term_polar_cartesian",
        ],
    );
}

#[test]
fn criterion_7_angular_extension() {
    require(
        "criterion 7 (X_1-Jacobi extension)",
        &[
            "angular_ext_msq_preserved",
            "angular_ext_gram",
            "angular_ext_residual",
            "angular_ext_fd_eigenpair",
            "hext_scale_resolution",
        ],
    );
    // the prefactor ambiguity must resolve with >= 6 orders of magnitude
    // between the two candidate operator scales
    let res = check("hext_scale_resolution");
    let half = res.params["residual_half"].as_f64().unwrap();
    let one = res.params["residual_one"].as_f64().unwrap();
    let gap = half.max(one) / half.min(one).max(1e-300);
    println!(
        "PASS criterion 7 (scale resolution gap): {:.1} orders of magnitude, chosen scale {}",
        gap.log10(),
        res.params["chosen"]
    );
    assert!(gap >= 1e6, "gap {gap} below 6 orders");
}

#[test]
fn criterion_8_undeformed_limit() {
    require(
        "criterion 8 (undeformed limit matches the ordinary 2D oscillator)",
        &["undeformed_reduction", "level_degeneracy"],
    );
}

#[test]
fn criterion_9_solver_integrity() {
    // every accepted polynomial passes the dual certification by
    // construction; here the perturbed-energy trials must all collapse
    let c = check("nullspace_perturbation");
    let trials = c.params["trials"].as_u64().unwrap();
    let pass = c.pass && trials == 100 && c.deviation == 0.0;
    println!(
        "{} criterion 9 (EOP solver integrity): {}/{} perturbed-energy trials rejected",
        if pass { "PASS" } else { "FAIL" },
        trials - c.deviation as u64,
        trials
    );
    assert!(pass);

    // spot check that accepted constructions still come out of the same
    // certified path with a genuine polynomial of the requested degree
    let p = Parameters::new(0.3, 0.7).unwrap();
    for (tau, m, k, n2) in [
        (ExtensionType::I, 1u32, 4u32, 1u32),
        (ExtensionType::III, 2, 0, 2),
    ] {
        let spec = ExtensionSpec::new(tau, m).unwrap();
        let st = extended_radial_state(spec, k, n2, &p).unwrap();
        assert_eq!(st.form().num().degree(), k as usize);
    }
}

#[test]
fn bundle_reports_are_reproducible() {
    let p = Parameters::new(0.3, 0.7).unwrap();
    let cfg = SuiteConfig {
        quick: true,
        ..SuiteConfig::default()
    };
    let a = serde_json::to_string(&run_full_suite(&p, &cfg).unwrap()).unwrap();
    let b = serde_json::to_string(&run_full_suite(&p, &cfg).unwrap()).unwrap();
    assert_eq!(a, b, "bundle serialization must be bit-identical");
    let _qn = QuantumNumbers::new(SectorLabel::new(0, 0).unwrap(), 0, 0).unwrap();
}
