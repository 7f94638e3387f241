//! Separability verdicts, decomposition certificates, Werner thresholds,
//! and the entanglement-versus-nonlocality cross-tabulation.
//!
//! The positive-partial-transpose test decides separability exactly when the
//! total dimension is at most 6 (two qubits, or qubit-qutrit); above that a
//! nonnegative partial transpose proves nothing, and the verdict honestly
//! says so. The scan walks a one-parameter state family and records, per
//! grid point, the PPT verdict, the projective CHSH optimum, and polytope
//! membership of the behavior at the CHSH-optimal settings — exhibiting the
//! separable band, the entangled-but-CHSH-local band, and the violating band.

use std::fmt;

use crate::error::{Error, Result};
use crate::linalg::{hermitian_eigenvalues, partial_transpose, Party};
use crate::locality::{
    behavior_from_state, chsh_max, chsh_optimal_settings, lhv_membership, LhvResult,
    DEFAULT_LP_TOL,
};
use crate::quantum::{
    separable_mixture, werner_state, white_noise_mixture, DensityOperator, SeparableComponents,
};

/// Default tolerance for the PPT verdict (eigenvalue floor).
pub const DEFAULT_PPT_TOL: f64 = 1e-9;

/// Bisection depth for threshold searches; 2^-60 outstrips any double
/// tolerance a caller can request.
const MAX_BISECTION_STEPS: usize = 60;

/// Caveat attached to every scan row: membership was tested at one finite
/// settings choice.
pub const LHV_SCOPE_NOTE: &str = "LHV verdict holds at the CHSH-optimal projective settings; \
     feasibility at finitely many settings does not certify a local model for all measurements";

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PptVerdict {
    Separable,
    Entangled,
    /// Partial transpose is nonnegative but the dimensions are too large
    /// for that to settle separability.
    Inconclusive,
}

impl fmt::Display for PptVerdict {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            Self::Separable => "separable",
            Self::Entangled => "entangled",
            Self::Inconclusive => "inconclusive",
        };
        f.write_str(s)
    }
}

/// Result of the partial-transpose test.
#[derive(Debug, Clone)]
pub struct PptReport {
    pub min_eigenvalue: f64,
    pub verdict: PptVerdict,
    pub dims: (usize, usize),
    pub tol: f64,
}

/// Partial-transpose separability test: transposes the B side and inspects
/// the smallest eigenvalue. Negative beyond `tol` proves entanglement in any
/// dimension; nonnegative proves separability only for total dimension <= 6.
pub fn ppt_test(rho: &DensityOperator, tol: f64) -> Result<PptReport> {
    if !rho.is_bipartite() {
        return Err(Error::Shape("PPT test requires a bipartite state".into()));
    }
    let pt = partial_transpose(rho.matrix(), rho.dim_a(), rho.dim_b(), Party::B)?;
    let vals = hermitian_eigenvalues(&pt, 1e-9)?;
    let min_eigenvalue = vals[0];
    let verdict = if min_eigenvalue < -tol {
        PptVerdict::Entangled
    } else if rho.dim() <= 6 {
        PptVerdict::Separable
    } else {
        PptVerdict::Inconclusive
    };
    Ok(PptReport {
        min_eigenvalue,
        verdict,
        dims: (rho.dim_a(), rho.dim_b()),
        tol,
    })
}

/// Largest entry deviation between a state and the mixture assembled from a
/// claimed product decomposition; at or below the caller's tolerance the
/// decomposition certifies the state as classically correlated.
pub fn verify_separable_decomposition(
    rho: &DensityOperator,
    c: &SeparableComponents,
) -> Result<f64> {
    if c.dim_a() != rho.dim_a() || c.dim_b() != rho.dim_b() {
        return Err(Error::Shape(format!(
            "decomposition is {}x{}, state is {}x{}",
            c.dim_a(),
            c.dim_b(),
            rho.dim_a(),
            rho.dim_b()
        )));
    }
    let rebuilt = separable_mixture(c)?;
    Ok(rho.matrix().max_abs_diff(rebuilt.matrix()))
}

fn bisect(tol: f64, mut predicate: impl FnMut(f64) -> Result<bool>) -> Result<f64> {
    // predicate is false at 0 and true at 1; find the crossing
    let mut lo = 0.0f64;
    let mut hi = 1.0f64;
    for _ in 0..MAX_BISECTION_STEPS {
        if hi - lo <= tol {
            break;
        }
        let mid = 0.5 * (lo + hi);
        if predicate(mid)? {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    Ok(0.5 * (lo + hi))
}

/// Werner parameter where the PPT verdict flips, found by bisection; the
/// analytic crossing is at 1/3.
pub fn werner_ppt_threshold(tol: f64) -> Result<f64> {
    if tol <= 0.0 {
        return Err(Error::Domain("tolerance must be positive".into()));
    }
    bisect(tol, |p| {
        Ok(ppt_test(&werner_state(p)?, DEFAULT_PPT_TOL)?.verdict == PptVerdict::Entangled)
    })
}

/// Werner parameter where the projective CHSH optimum crosses the local
/// bound 2, found by bisection; the analytic crossing is at 1/sqrt(2).
pub fn werner_chsh_threshold(tol: f64) -> Result<f64> {
    if tol <= 0.0 {
        return Err(Error::Domain("tolerance must be positive".into()));
    }
    bisect(tol, |p| Ok(chsh_max(&werner_state(p)?)? > 2.0))
}

/// One-parameter families the scan knows how to build.
#[derive(Debug, Clone)]
pub enum ScanFamily {
    /// `p * (singlet) + (1-p) * I/4`.
    Werner,
    /// `p * rho + (1-p) * I/4` for a caller-supplied two-qubit state.
    NoisyState { state: DensityOperator },
}

impl ScanFamily {
    fn state_at(&self, p: f64) -> Result<DensityOperator> {
        match self {
            Self::Werner => werner_state(p),
            Self::NoisyState { state } => white_noise_mixture(state, p),
        }
    }
}

/// Classification of one scanned state.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Classification {
    Separable,
    EntangledChshLocal,
    EntangledChshViolating,
}

impl fmt::Display for Classification {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            Self::Separable => "separable",
            Self::EntangledChshLocal => "entangled-local-CHSH",
            Self::EntangledChshViolating => "entangled-CHSH-violating",
        };
        f.write_str(s)
    }
}

/// One grid point of a family scan.
#[derive(Debug, Clone)]
pub struct ScanRow {
    pub parameter: f64,
    pub ppt: PptReport,
    pub chsh_max: f64,
    /// Membership of the behavior at the CHSH-optimal settings.
    pub lhv_feasible: bool,
    /// Verified dual gap when infeasible.
    pub lhv_gap: Option<f64>,
    pub classification: Classification,
    /// Scope caveat for the LHV column; see [`LHV_SCOPE_NOTE`].
    pub lhv_note: &'static str,
}

/// Scans a family over a parameter grid. Per point: PPT verdict, projective
/// CHSH optimum, and polytope membership at the CHSH-optimal settings.
pub fn scan_family(family: &ScanFamily, grid: &[f64], tol: f64) -> Result<Vec<ScanRow>> {
    if let Some(&bad) = grid.iter().find(|p| !(0.0..=1.0).contains(*p)) {
        return Err(Error::Domain(format!(
            "grid value {bad} is outside [0,1]"
        )));
    }
    let mut rows = Vec::with_capacity(grid.len());
    for &p in grid {
        let rho = family.state_at(p)?;
        if rho.dim_a() != 2 || rho.dim_b() != 2 {
            return Err(Error::Shape("family scans are defined for two-qubit states".into()));
        }
        let ppt = ppt_test(&rho, tol)?;
        let s_max = chsh_max(&rho)?;
        let (alice, bob) = chsh_optimal_settings(&rho)?;
        let behavior = behavior_from_state(&rho, &alice, &bob)?;
        let lhv = lhv_membership(&behavior, DEFAULT_LP_TOL)?;
        let (lhv_feasible, lhv_gap) = match &lhv {
            LhvResult::Feasible { .. } => (true, None),
            LhvResult::Infeasible { gap, .. } => (false, Some(*gap)),
        };
        let classification = if s_max > 2.0 + tol {
            Classification::EntangledChshViolating
        } else if ppt.verdict == PptVerdict::Separable {
            Classification::Separable
        } else {
            Classification::EntangledChshLocal
        };
        rows.push(ScanRow {
            parameter: p,
            ppt,
            chsh_max: s_max,
            lhv_feasible,
            lhv_gap,
            classification,
            lhv_note: LHV_SCOPE_NOTE,
        });
    }
    Ok(rows)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::quantum::{
        bell_state, random_separable, werner_product_decomposition, BellKind, SeparableComponent,
    };

    const SQRT2: f64 = std::f64::consts::SQRT_2;

    #[test]
    fn ppt_flags_maximally_entangled_states() {
        let report = ppt_test(&bell_state(BellKind::PhiPlus), DEFAULT_PPT_TOL).unwrap();
        assert_eq!(report.verdict, PptVerdict::Entangled);
        assert!((report.min_eigenvalue + 0.5).abs() < 1e-12);
    }

    #[test]
    fn ppt_matches_werner_formula_on_grid() {
        for i in 0..=20 {
            let p = i as f64 / 20.0;
            let report = ppt_test(&werner_state(p).unwrap(), DEFAULT_PPT_TOL).unwrap();
            let expect = (1.0 - 3.0 * p) / 4.0;
            assert!(
                (report.min_eigenvalue - expect).abs() < 1e-12,
                "p={p}: {} vs {expect}",
                report.min_eigenvalue
            );
            let should_be_entangled = p > 1.0 / 3.0 + 1e-9;
            assert_eq!(report.verdict == PptVerdict::Entangled, should_be_entangled, "p={p}");
        }
    }

    #[test]
    fn ppt_never_flags_separable_mixtures() {
        for seed in 0..100u64 {
            let c = random_separable(2, 2, 3, seed).unwrap();
            let rho = separable_mixture(&c).unwrap();
            let report = ppt_test(&rho, DEFAULT_PPT_TOL).unwrap();
            assert_eq!(report.verdict, PptVerdict::Separable, "seed {seed}");
            assert!(report.min_eigenvalue >= -1e-9);
        }
    }

    #[test]
    fn ppt_is_inconclusive_above_dimension_six() {
        let rho_a = crate::quantum::random_density(2, 1).unwrap();
        let rho_b = crate::quantum::random_density(4, 2).unwrap();
        let prod = DensityOperator::new(
            crate::linalg::kron(rho_a.matrix(), rho_b.matrix()).unwrap(),
            2,
            4,
        )
        .unwrap();
        let report = ppt_test(&prod, DEFAULT_PPT_TOL).unwrap();
        assert_eq!(report.verdict, PptVerdict::Inconclusive);
    }

    #[test]
    fn decomposition_certificates() {
        // a mixture verifies against its own components to round-off
        let c = random_separable(2, 2, 4, 9).unwrap();
        let rho = separable_mixture(&c).unwrap();
        assert!(verify_separable_decomposition(&rho, &c).unwrap() <= 1e-14);

        // the Werner boundary state against its analytic product decomposition
        let w = werner_state(1.0 / 3.0).unwrap();
        let c = werner_product_decomposition(1.0 / 3.0).unwrap();
        assert!(verify_separable_decomposition(&w, &c).unwrap() <= 1e-10);

        // no candidate comes close to a maximally entangled state: its 1/2
        // coherence exceeds the 1/4 any separable state can carry
        let phi = bell_state(BellKind::PhiPlus);
        let candidates = [
            werner_product_decomposition(1.0 / 3.0).unwrap(),
            werner_product_decomposition(0.0).unwrap(),
            random_separable(2, 2, 6, 4).unwrap(),
            random_separable(2, 2, 2, 5).unwrap(),
        ];
        for c in &candidates {
            let residual = verify_separable_decomposition(&phi, c).unwrap();
            assert!(residual >= 0.25, "residual {residual}");
        }
    }

    #[test]
    fn decomposition_dimension_mismatch() {
        let w = werner_state(0.2).unwrap();
        let c = random_separable(2, 3, 2, 1).unwrap();
        assert!(matches!(
            verify_separable_decomposition(&w, &c),
            Err(Error::Shape(_))
        ));
    }

    #[test]
    fn werner_thresholds_hit_the_analytic_values() {
        let p = werner_ppt_threshold(1e-6).unwrap();
        assert!((p - 1.0 / 3.0).abs() <= 1e-6, "ppt threshold {p}");
        // bracketing
        let below = ppt_test(&werner_state(p - 1e-6).unwrap(), DEFAULT_PPT_TOL).unwrap();
        assert_eq!(below.verdict, PptVerdict::Separable);
        let above = ppt_test(&werner_state(p + 1e-6).unwrap(), DEFAULT_PPT_TOL).unwrap();
        assert_eq!(above.verdict, PptVerdict::Entangled);

        let p = werner_chsh_threshold(1e-6).unwrap();
        assert!((p - 1.0 / SQRT2).abs() <= 1e-6, "chsh threshold {p}");
        assert!(chsh_max(&werner_state(p - 1e-6).unwrap()).unwrap() <= 2.0);
        assert!(chsh_max(&werner_state(p + 1e-6).unwrap()).unwrap() > 2.0);

        assert!(matches!(werner_ppt_threshold(0.0), Err(Error::Domain(_))));
    }

    #[test]
    fn werner_chsh_values() {
        assert!((chsh_max(&werner_state(0.8).unwrap()).unwrap() - 2.0 * SQRT2 * 0.8).abs() < 1e-9);
        assert!(chsh_max(&werner_state(0.5).unwrap()).unwrap() <= 2.0);
    }

    #[test]
    fn scan_classifications_over_a_coarse_grid() {
        let rows = scan_family(&ScanFamily::Werner, &[0.0, 0.2, 0.5, 0.9], DEFAULT_PPT_TOL).unwrap();
        let classes: Vec<Classification> = rows.iter().map(|r| r.classification).collect();
        assert_eq!(
            classes,
            vec![
                Classification::Separable,
                Classification::Separable,
                Classification::EntangledChshLocal,
                Classification::EntangledChshViolating,
            ]
        );
        // separable and CHSH-local rows are LHV-feasible, the violating row
        // is not
        assert!(rows[0].lhv_feasible && rows[1].lhv_feasible && rows[2].lhv_feasible);
        assert!(!rows[3].lhv_feasible);
        assert!(rows[3].lhv_gap.unwrap() > 1e-8);

        let rows = scan_family(&ScanFamily::Werner, &[1.0], DEFAULT_PPT_TOL).unwrap();
        assert_eq!(rows[0].classification, Classification::EntangledChshViolating);
        assert!((rows[0].chsh_max - 2.0 * SQRT2).abs() < 1e-9);

        let rows = scan_family(&ScanFamily::Werner, &[0.0], DEFAULT_PPT_TOL).unwrap();
        assert_eq!(rows[0].classification, Classification::Separable);
        assert!(rows[0].chsh_max.abs() < 1e-9);

        assert!(matches!(
            scan_family(&ScanFamily::Werner, &[1.2], DEFAULT_PPT_TOL),
            Err(Error::Domain(_))
        ));
    }

    #[test]
    fn partial_transpose_minimum_decreases_along_the_werner_family() {
        let mut previous = f64::INFINITY;
        for i in 0..=100 {
            let p = i as f64 * 0.01;
            let report = ppt_test(&werner_state(p).unwrap(), DEFAULT_PPT_TOL).unwrap();
            assert!(
                report.min_eigenvalue < previous,
                "p={p}: {} not below {previous}",
                report.min_eigenvalue
            );
            previous = report.min_eigenvalue;
        }
    }

    #[test]
    fn noisy_bell_family_scans_too() {
        let family = ScanFamily::NoisyState { state: bell_state(BellKind::PhiPlus) };
        let rows = scan_family(&family, &[0.0, 0.5, 0.9], DEFAULT_PPT_TOL).unwrap();
        assert_eq!(rows[0].classification, Classification::Separable);
        assert_eq!(rows[1].classification, Classification::EntangledChshLocal);
        assert_eq!(rows[2].classification, Classification::EntangledChshViolating);
    }

    #[test]
    fn mixture_with_explicit_diagonal_component_stays_separable() {
        // a hand-built classically correlated state passes both the PPT test
        // and its own certificate
        let p0 = DensityOperator::single_party(crate::linalg::ComplexMatrix::from_real(
            2,
            2,
            &[1.0, 0.0, 0.0, 0.0],
        ))
        .unwrap();
        let p1 = DensityOperator::single_party(crate::linalg::ComplexMatrix::from_real(
            2,
            2,
            &[0.0, 0.0, 0.0, 1.0],
        ))
        .unwrap();
        let c = SeparableComponents::new(vec![
            SeparableComponent { weight: 0.5, rho_a: p0.clone(), rho_b: p1.clone() },
            SeparableComponent { weight: 0.5, rho_a: p1, rho_b: p0 },
        ])
        .unwrap();
        let rho = separable_mixture(&c).unwrap();
        assert_eq!(ppt_test(&rho, DEFAULT_PPT_TOL).unwrap().verdict, PptVerdict::Separable);
        assert!(verify_separable_decomposition(&rho, &c).unwrap() <= 1e-15);
    }
}
