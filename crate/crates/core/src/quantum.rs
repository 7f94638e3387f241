//! Density operators, projective measurements, state families, and
//! Born-rule joint probabilities for bipartite systems.
//!
//! The central identity implemented here: for a state built as a convex
//! mixture of products, `Tr(rho_AB P_A (x) P_B)` equals the mixture of the
//! per-component products `Tr(rho_A P_A) * Tr(rho_B P_B)`. The mixture
//! constructor, the joint-probability engine, and the two-sided residual
//! check each take an independent route to those numbers.

use std::fmt;
use std::str::FromStr;

use crate::error::{Error, Result};
use crate::linalg::{
    c64, kron, partial_trace, trace_product, validate_density, Complex64, ComplexMatrix, Party,
    DEFAULT_DENSITY_TOL,
};
use crate::rng::{split_seed, SplitMix64};

/// Default tolerance for projector validation.
pub const DEFAULT_MEASUREMENT_TOL: f64 = 1e-9;

pub fn pauli_x() -> ComplexMatrix {
    ComplexMatrix::from_real(2, 2, &[0.0, 1.0, 1.0, 0.0])
}

pub fn pauli_y() -> ComplexMatrix {
    ComplexMatrix::new(
        2,
        2,
        vec![c64(0.0, 0.0), c64(0.0, -1.0), c64(0.0, 1.0), c64(0.0, 0.0)],
    )
}

pub fn pauli_z() -> ComplexMatrix {
    ComplexMatrix::from_real(2, 2, &[1.0, 0.0, 0.0, -1.0])
}

/// `n . sigma` for a (not necessarily unit) Bloch vector.
pub fn bloch_operator(n: [f64; 3]) -> ComplexMatrix {
    let mut m = pauli_x().scale_re(n[0]);
    m = m.add(&pauli_y().scale_re(n[1]));
    m.add(&pauli_z().scale_re(n[2]))
}

/// A validated quantum state on `C^dim_a (x) C^dim_b`; `dim_b = 1` marks a
/// single-party state.
#[derive(Debug, Clone, PartialEq)]
pub struct DensityOperator {
    dim_a: usize,
    dim_b: usize,
    matrix: ComplexMatrix,
}

impl DensityOperator {
    /// Wraps a matrix after validating it as a density operator at the
    /// default tolerance.
    pub fn new(matrix: ComplexMatrix, dim_a: usize, dim_b: usize) -> Result<Self> {
        Self::with_tolerance(matrix, dim_a, dim_b, DEFAULT_DENSITY_TOL)
    }

    pub fn with_tolerance(
        matrix: ComplexMatrix,
        dim_a: usize,
        dim_b: usize,
        tol: f64,
    ) -> Result<Self> {
        if dim_a == 0 || dim_b == 0 {
            return Err(Error::Domain("subsystem dimensions must be positive".into()));
        }
        if !matrix.is_square() || matrix.rows() != dim_a * dim_b {
            return Err(Error::Shape(format!(
                "density matrix must be square of side {}*{}={}, got {}x{}",
                dim_a,
                dim_b,
                dim_a * dim_b,
                matrix.rows(),
                matrix.cols()
            )));
        }
        let report = validate_density(&matrix, tol);
        if !report.pass {
            return Err(Error::Domain(format!(
                "not a density operator at tolerance {:.1e}: hermiticity residual {:.3e}, \
                 trace deviation {:.3e}, min eigenvalue {:.3e}",
                tol, report.hermiticity_residual, report.trace_deviation, report.min_eigenvalue
            )));
        }
        Ok(Self { dim_a, dim_b, matrix })
    }

    /// Single-party state (`dim_b = 1`).
    pub fn single_party(matrix: ComplexMatrix) -> Result<Self> {
        let d = matrix.rows();
        Self::new(matrix, d, 1)
    }

    /// Reinterprets the tensor split without touching the matrix.
    pub fn into_bipartite(self, dim_a: usize, dim_b: usize) -> Result<Self> {
        if dim_a * dim_b != self.dim() {
            return Err(Error::Shape(format!(
                "cannot split a dimension-{} state as {}x{}",
                self.dim(),
                dim_a,
                dim_b
            )));
        }
        Ok(Self {
            dim_a,
            dim_b,
            matrix: self.matrix,
        })
    }

    pub fn dim_a(&self) -> usize {
        self.dim_a
    }

    pub fn dim_b(&self) -> usize {
        self.dim_b
    }

    /// Total Hilbert-space dimension.
    pub fn dim(&self) -> usize {
        self.dim_a * self.dim_b
    }

    pub fn matrix(&self) -> &ComplexMatrix {
        &self.matrix
    }

    pub fn is_bipartite(&self) -> bool {
        self.dim_b > 1
    }
}

/// The four maximally entangled two-qubit basis states.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum BellKind {
    PhiPlus,
    PhiMinus,
    PsiPlus,
    PsiMinus,
}

impl FromStr for BellKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "phi+" => Ok(Self::PhiPlus),
            "phi-" => Ok(Self::PhiMinus),
            "psi+" => Ok(Self::PsiPlus),
            "psi-" => Ok(Self::PsiMinus),
            other => Err(Error::Domain(format!(
                "unknown Bell state '{other}' (expected phi+, phi-, psi+ or psi-)"
            ))),
        }
    }
}

impl fmt::Display for BellKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            Self::PhiPlus => "phi+",
            Self::PhiMinus => "phi-",
            Self::PsiPlus => "psi+",
            Self::PsiMinus => "psi-",
        };
        f.write_str(s)
    }
}

/// One of the four Bell states as a density operator. Entries are exactly
/// 0 or +-1/2 (the projector is written out directly rather than squaring
/// 1/sqrt(2) amplitudes).
pub fn bell_state(kind: BellKind) -> DensityOperator {
    // basis order |00>, |01>, |10>, |11|; Phi lives on {0,3}, Psi on {1,2}
    let (i, j, sign) = match kind {
        BellKind::PhiPlus => (0, 3, 0.5),
        BellKind::PhiMinus => (0, 3, -0.5),
        BellKind::PsiPlus => (1, 2, 0.5),
        BellKind::PsiMinus => (1, 2, -0.5),
    };
    let mut m = ComplexMatrix::zeros(4, 4);
    m.set(i, i, c64(0.5, 0.0));
    m.set(j, j, c64(0.5, 0.0));
    m.set(i, j, c64(sign, 0.0));
    m.set(j, i, c64(sign, 0.0));
    DensityOperator::new(m, 2, 2).expect("Bell state is a valid density operator")
}

/// Maximally mixed state `I/(dim_a*dim_b)` with the given tensor split.
pub fn maximally_mixed(dim_a: usize, dim_b: usize) -> DensityOperator {
    let d = dim_a * dim_b;
    DensityOperator::new(ComplexMatrix::identity(d).scale_re(1.0 / d as f64), dim_a, dim_b)
        .expect("white noise is a valid density operator")
}

/// Werner family `p * (singlet projector) + (1-p) * I/4`. Spectrum is
/// `(1+3p)/4` once and `(1-p)/4` three times.
pub fn werner_state(p: f64) -> Result<DensityOperator> {
    if !(0.0..=1.0).contains(&p) {
        return Err(Error::Domain(format!("Werner parameter must lie in [0,1], got {p}")));
    }
    white_noise_mixture(&bell_state(BellKind::PsiMinus), p)
}

/// `p * rho + (1-p) * I/d`: the given state mixed with white noise.
pub fn white_noise_mixture(rho: &DensityOperator, p: f64) -> Result<DensityOperator> {
    if !(0.0..=1.0).contains(&p) {
        return Err(Error::Domain(format!("mixing weight must lie in [0,1], got {p}")));
    }
    let d = rho.dim();
    let m = rho
        .matrix()
        .scale_re(p)
        .add(&ComplexMatrix::identity(d).scale_re((1.0 - p) / d as f64));
    DensityOperator::new(m, rho.dim_a(), rho.dim_b())
}

/// A weighted product component of a separable decomposition.
#[derive(Debug, Clone)]
pub struct SeparableComponent {
    pub weight: f64,
    pub rho_a: DensityOperator,
    pub rho_b: DensityOperator,
}

/// Decomposition data for a classically correlated state: nonnegative
/// weights summing to one, each paired with single-party states for the
/// two sides.
#[derive(Debug, Clone)]
pub struct SeparableComponents {
    components: Vec<SeparableComponent>,
}

impl SeparableComponents {
    pub fn new(components: Vec<SeparableComponent>) -> Result<Self> {
        if components.is_empty() {
            return Err(Error::Domain("decomposition needs at least one component".into()));
        }
        let (da, db) = (components[0].rho_a.dim(), components[0].rho_b.dim());
        let mut total = 0.0;
        for (i, c) in components.iter().enumerate() {
            if c.weight < 0.0 || !c.weight.is_finite() {
                return Err(Error::Domain(format!(
                    "component {i} has invalid weight {}",
                    c.weight
                )));
            }
            if c.rho_a.dim_b() != 1 || c.rho_b.dim_b() != 1 {
                return Err(Error::Shape(format!(
                    "component {i} must be built from single-party states"
                )));
            }
            if c.rho_a.dim() != da || c.rho_b.dim() != db {
                return Err(Error::Shape(format!(
                    "component {i} has dimensions {}x{}, expected {}x{}",
                    c.rho_a.dim(),
                    c.rho_b.dim(),
                    da,
                    db
                )));
            }
            total += c.weight;
        }
        if (total - 1.0).abs() > 1e-12 {
            return Err(Error::Domain(format!(
                "weights must sum to 1 within 1e-12, got {total}"
            )));
        }
        Ok(Self { components })
    }

    pub fn components(&self) -> &[SeparableComponent] {
        &self.components
    }

    pub fn dim_a(&self) -> usize {
        self.components[0].rho_a.dim()
    }

    pub fn dim_b(&self) -> usize {
        self.components[0].rho_b.dim()
    }
}

/// Assembles `sum_mu lambda_mu rho_A_mu (x) rho_B_mu`.
pub fn separable_mixture(c: &SeparableComponents) -> Result<DensityOperator> {
    let (da, db) = (c.dim_a(), c.dim_b());
    let mut acc = ComplexMatrix::zeros(da * db, da * db);
    for comp in c.components() {
        let prod = kron(comp.rho_a.matrix(), comp.rho_b.matrix())?;
        acc = acc.add(&prod.scale_re(comp.weight));
    }
    DensityOperator::new(acc, da, db)
}

/// Explicit product decomposition of a Werner state with `p <= 1/3`:
/// six equally weighted components `((I + e s_k)/2, (I - e s_k)/2)` and the
/// swap, over the three Pauli axes, with local polarization `e = sqrt(3p)`.
pub fn werner_product_decomposition(p: f64) -> Result<SeparableComponents> {
    if !(0.0..=1.0 / 3.0 + 1e-12).contains(&p) {
        return Err(Error::Domain(format!(
            "product decomposition exists for p in [0, 1/3], got {p}"
        )));
    }
    let eps = (3.0 * p).sqrt().min(1.0);
    let half_i = ComplexMatrix::identity(2).scale_re(0.5);
    let mut components = Vec::with_capacity(6);
    for sigma in [pauli_x(), pauli_y(), pauli_z()] {
        let plus = half_i.add(&sigma.scale_re(eps / 2.0));
        let minus = half_i.sub(&sigma.scale_re(eps / 2.0));
        let plus = DensityOperator::single_party(plus)?;
        let minus = DensityOperator::single_party(minus)?;
        components.push(SeparableComponent {
            weight: 1.0 / 6.0,
            rho_a: plus.clone(),
            rho_b: minus.clone(),
        });
        components.push(SeparableComponent {
            weight: 1.0 / 6.0,
            rho_a: minus,
            rho_b: plus,
        });
    }
    SeparableComponents::new(components)
}

/// Random density operator `G G^dag / Tr(G G^dag)` where `G` has independent
/// standard complex Gaussian entries drawn row-major (real part first) from
/// `SplitMix64::new(seed)`. Same seed, same matrix, bit for bit.
pub fn random_density(dim: usize, seed: u64) -> Result<DensityOperator> {
    if dim < 1 {
        return Err(Error::Domain("dimension must be at least 1".into()));
    }
    let mut rng = SplitMix64::new(seed);
    let g = ComplexMatrix::from_fn(dim, dim, |_, _| {
        let re = rng.next_normal();
        let im = rng.next_normal();
        c64(re, im)
    });
    let gg = g.matmul(&g.adjoint());
    let trace = gg.trace().re;
    DensityOperator::single_party(gg.scale_re(1.0 / trace))
}

/// Seeded separable decomposition with `k` random product components;
/// weights are normalized uniforms. Intended as a property-test input
/// generator.
pub fn random_separable(dim_a: usize, dim_b: usize, k: usize, seed: u64) -> Result<SeparableComponents> {
    if k == 0 {
        return Err(Error::Domain("need at least one component".into()));
    }
    let mut rng = SplitMix64::new(seed);
    let mut weights: Vec<f64> = (0..k).map(|_| rng.next_f64_open()).collect();
    let total: f64 = weights.iter().sum();
    for w in &mut weights {
        *w /= total;
    }
    let mut components = Vec::with_capacity(k);
    for w in weights {
        let rho_a = random_density(dim_a, rng.next_u64())?;
        let rho_b = random_density(dim_b, rng.next_u64())?;
        components.push(SeparableComponent { weight: w, rho_a, rho_b });
    }
    SeparableComponents::new(components)
}

/// A complete set of mutually orthogonal projectors with outcome labels.
#[derive(Debug, Clone, PartialEq)]
pub struct ProjectiveMeasurement {
    dim: usize,
    projectors: Vec<ComplexMatrix>,
    labels: Vec<String>,
}

impl ProjectiveMeasurement {
    /// Validates hermiticity, idempotence, mutual orthogonality, and
    /// completeness of the projector set at the default tolerance.
    pub fn new(projectors: Vec<ComplexMatrix>, labels: Vec<String>) -> Result<Self> {
        Self::with_tolerance(projectors, labels, DEFAULT_MEASUREMENT_TOL)
    }

    pub fn with_tolerance(
        projectors: Vec<ComplexMatrix>,
        labels: Vec<String>,
        tol: f64,
    ) -> Result<Self> {
        if projectors.is_empty() {
            return Err(Error::Domain("a measurement needs at least one projector".into()));
        }
        if labels.len() != projectors.len() {
            return Err(Error::Shape(format!(
                "{} labels for {} projectors",
                labels.len(),
                projectors.len()
            )));
        }
        let dim = projectors[0].rows();
        for (k, p) in projectors.iter().enumerate() {
            if !p.is_square() || p.rows() != dim {
                return Err(Error::Shape(format!(
                    "projector {k} is {}x{}, expected {dim}x{dim}",
                    p.rows(),
                    p.cols()
                )));
            }
            let herm = p.hermiticity_residual();
            if herm > tol {
                return Err(Error::Domain(format!(
                    "projector {k} is not Hermitian (residual {herm:.3e})"
                )));
            }
            let idem = p.matmul(p).max_abs_diff(p);
            if idem > tol {
                return Err(Error::Domain(format!(
                    "projector {k} is not idempotent (residual {idem:.3e})"
                )));
            }
        }
        for i in 0..projectors.len() {
            for j in (i + 1)..projectors.len() {
                let cross = projectors[i].matmul(&projectors[j]).max_abs();
                if cross > tol {
                    return Err(Error::Domain(format!(
                        "projectors {i} and {j} are not orthogonal (residual {cross:.3e})"
                    )));
                }
            }
        }
        let mut sum = ComplexMatrix::zeros(dim, dim);
        for p in &projectors {
            sum = sum.add(p);
        }
        let completeness = sum.max_abs_diff(&ComplexMatrix::identity(dim));
        if completeness > tol {
            return Err(Error::Domain(format!(
                "projectors do not sum to the identity (residual {completeness:.3e})"
            )));
        }
        Ok(Self { dim, projectors, labels })
    }

    /// Measurement in the computational basis, labels "0", "1", ...
    pub fn computational(dim: usize) -> Self {
        let projectors = (0..dim)
            .map(|k| {
                let mut v = vec![c64(0.0, 0.0); dim];
                v[k] = c64(1.0, 0.0);
                ComplexMatrix::outer(&v)
            })
            .collect();
        let labels = (0..dim).map(|k| k.to_string()).collect();
        Self::new(projectors, labels).expect("computational basis is a valid measurement")
    }

    /// Rank-1 measurement whose outcomes are the columns of a unitary.
    pub fn from_unitary_columns(u: &ComplexMatrix) -> Result<Self> {
        if !u.is_square() {
            return Err(Error::Shape("basis matrix must be square".into()));
        }
        let dim = u.rows();
        let projectors = (0..dim)
            .map(|k| {
                let col: Vec<Complex64> = (0..dim).map(|r| u.get(r, k)).collect();
                ComplexMatrix::outer(&col)
            })
            .collect();
        let labels = (0..dim).map(|k| k.to_string()).collect();
        Self::new(projectors, labels)
    }

    /// Qubit measurement along a Bloch direction: projectors
    /// `(I +- n.sigma)/2` labelled "+" then "-". The first label is the
    /// +1 outcome wherever outcomes are mapped to signs.
    pub fn along_bloch(n: [f64; 3]) -> Result<Self> {
        let norm = (n[0] * n[0] + n[1] * n[1] + n[2] * n[2]).sqrt();
        if norm < 1e-12 {
            return Err(Error::Domain("Bloch direction must be nonzero".into()));
        }
        let unit = [n[0] / norm, n[1] / norm, n[2] / norm];
        let half_op = bloch_operator(unit).scale_re(0.5);
        let half_i = ComplexMatrix::identity(2).scale_re(0.5);
        let plus = half_i.add(&half_op);
        let minus = half_i.sub(&half_op);
        Self::new(vec![plus, minus], vec!["+".into(), "-".into()])
    }

    /// Seeded random rank-1 basis from a composed-rotation unitary.
    pub fn random(dim: usize, seed: u64) -> Self {
        let u = crate::linalg::random_unitary(dim, seed);
        Self::from_unitary_columns(&u).expect("rotated basis is a valid measurement")
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn outcomes(&self) -> usize {
        self.projectors.len()
    }

    pub fn projector(&self, k: usize) -> &ComplexMatrix {
        &self.projectors[k]
    }

    pub fn projectors(&self) -> &[ComplexMatrix] {
        &self.projectors
    }

    pub fn labels(&self) -> &[String] {
        &self.labels
    }
}

/// Born-rule joint outcome distribution `P(a,b) = Tr(rho P_Aa (x) P_Bb)`,
/// indexed `[a][b]`. Entries more negative than -1e-12, or a total off 1 by
/// more than 1e-10, are reported as errors rather than silently repaired;
/// round-off negatives inside the band are clamped to zero.
pub fn joint_probabilities(
    rho: &DensityOperator,
    meas_a: &ProjectiveMeasurement,
    meas_b: &ProjectiveMeasurement,
) -> Result<Vec<Vec<f64>>> {
    if meas_a.dim() != rho.dim_a() || meas_b.dim() != rho.dim_b() {
        return Err(Error::Shape(format!(
            "measurement dimensions {}x{} do not match state dimensions {}x{}",
            meas_a.dim(),
            meas_b.dim(),
            rho.dim_a(),
            rho.dim_b()
        )));
    }
    let mut table = vec![vec![0.0; meas_b.outcomes()]; meas_a.outcomes()];
    let mut total = 0.0;
    for (a, pa) in meas_a.projectors().iter().enumerate() {
        for (b, pb) in meas_b.projectors().iter().enumerate() {
            let op = kron(pa, pb)?;
            let p = trace_product(rho.matrix(), &op).re;
            if p < -1e-12 {
                return Err(Error::Numeric(format!(
                    "joint probability P({a},{b}) = {p:.3e} is negative beyond round-off"
                )));
            }
            let p = p.max(0.0);
            table[a][b] = p;
            total += p;
        }
    }
    if (total - 1.0).abs() > 1e-10 {
        return Err(Error::Numeric(format!(
            "joint probabilities sum to {total}, deviating from 1 by more than 1e-10"
        )));
    }
    Ok(table)
}

/// Reduced state of the kept party.
pub fn reduced_state(rho: &DensityOperator, keep: Party) -> Result<DensityOperator> {
    if !rho.is_bipartite() {
        return Err(Error::Shape("reduced state requires a bipartite input".into()));
    }
    let (traced, kept_dim) = match keep {
        Party::A => (Party::B, rho.dim_a()),
        Party::B => (Party::A, rho.dim_b()),
    };
    let m = partial_trace(rho.matrix(), rho.dim_a(), rho.dim_b(), traced)?;
    DensityOperator::new(m, kept_dim, 1)
}

/// Largest deviation, over all outcome pairs, between the joint probability
/// of the assembled mixture and the weighted product of per-component local
/// probabilities. Linearity of the trace makes this an identity, so the
/// residual is round-off only.
pub fn verify_mixture_equality(
    c: &SeparableComponents,
    meas_a: &ProjectiveMeasurement,
    meas_b: &ProjectiveMeasurement,
) -> Result<f64> {
    let rho = separable_mixture(c)?;
    if meas_a.dim() != rho.dim_a() || meas_b.dim() != rho.dim_b() {
        return Err(Error::Shape(format!(
            "measurement dimensions {}x{} do not match state dimensions {}x{}",
            meas_a.dim(),
            meas_b.dim(),
            rho.dim_a(),
            rho.dim_b()
        )));
    }
    // local probabilities per component, computed without ever forming the
    // joint operator
    let mut worst = 0.0f64;
    for (a, pa) in meas_a.projectors().iter().enumerate() {
        for (b, pb) in meas_b.projectors().iter().enumerate() {
            let joint = trace_product(rho.matrix(), &kron(pa, pb)?).re;
            let mut mixed = 0.0;
            for comp in c.components() {
                let la = trace_product(comp.rho_a.matrix(), pa).re;
                let lb = trace_product(comp.rho_b.matrix(), pb).re;
                mixed += comp.weight * la * lb;
            }
            worst = worst.max((joint - mixed).abs());
            let _ = (a, b);
        }
    }
    Ok(worst)
}

/// Measurement pair generator for property tests: `count` seeded random
/// rank-1 bases per party.
pub fn random_measurements(dim: usize, count: usize, seed: u64) -> Vec<ProjectiveMeasurement> {
    (0..count)
        .map(|k| ProjectiveMeasurement::random(dim, split_seed(seed, k as u64)))
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::hermitian_eigenvalues;

    #[test]
    fn bell_states_are_valid_and_exact() {
        for kind in [BellKind::PhiPlus, BellKind::PhiMinus, BellKind::PsiPlus, BellKind::PsiMinus] {
            let rho = bell_state(kind);
            assert_eq!(rho.matrix().trace(), c64(1.0, 0.0));
            // rank 1: spectrum {0,0,0,1}
            let vals = hermitian_eigenvalues(rho.matrix(), 1e-12).unwrap();
            assert!(vals[3] - 1.0 < 1e-12 && (vals[3] - 1.0).abs() < 1e-12);
            assert!(vals[2].abs() < 1e-12);
        }
        let phi = bell_state(BellKind::PhiPlus);
        assert_eq!(phi.matrix().get(0, 3), c64(0.5, 0.0));
        assert_eq!(phi.matrix().get(3, 0), c64(0.5, 0.0));
        assert_eq!(phi.matrix().get(1, 1), c64(0.0, 0.0));
    }

    #[test]
    fn bell_reduced_states_are_white() {
        let rho = bell_state(BellKind::PsiMinus);
        let ra = reduced_state(&rho, Party::A).unwrap();
        assert!(ra.matrix().max_abs_diff(&ComplexMatrix::identity(2).scale_re(0.5)) < 1e-15);
        let rb = reduced_state(&bell_state(BellKind::PhiPlus), Party::B).unwrap();
        assert!(rb.matrix().max_abs_diff(&ComplexMatrix::identity(2).scale_re(0.5)) < 1e-15);
    }

    #[test]
    fn werner_limits_and_spectrum() {
        let w0 = werner_state(0.0).unwrap();
        assert!(w0.matrix().max_abs_diff(&ComplexMatrix::identity(4).scale_re(0.25)) < 1e-15);

        let w1 = werner_state(1.0).unwrap();
        assert!(w1.matrix().max_abs_diff(bell_state(BellKind::PsiMinus).matrix()) < 1e-15);

        let w = werner_state(0.5).unwrap();
        let vals = hermitian_eigenvalues(w.matrix(), 1e-12).unwrap();
        for (v, expect) in vals.iter().zip([0.125, 0.125, 0.125, 0.625]) {
            assert!((v - expect).abs() < 1e-12, "{v} vs {expect}");
        }

        assert!(matches!(werner_state(1.5), Err(Error::Domain(_))));
        assert!(matches!(werner_state(-0.1), Err(Error::Domain(_))));
    }

    #[test]
    fn werner_eigenvalue_formula_on_grid() {
        for i in 0..=10 {
            let p = i as f64 / 10.0;
            let w = werner_state(p).unwrap();
            let vals = hermitian_eigenvalues(w.matrix(), 1e-12).unwrap();
            assert!((vals[3] - (1.0 + 3.0 * p) / 4.0).abs() < 1e-12);
            for v in &vals[..3] {
                assert!((v - (1.0 - p) / 4.0).abs() < 1e-12);
            }
        }
    }

    #[test]
    fn separable_mixture_simple_cases() {
        // single product component
        let rho_a = DensityOperator::single_party(ComplexMatrix::from_real(2, 2, &[0.8, 0.0, 0.0, 0.2])).unwrap();
        let rho_b = DensityOperator::single_party(ComplexMatrix::from_real(2, 2, &[0.4, 0.1, 0.1, 0.6])).unwrap();
        let c = SeparableComponents::new(vec![SeparableComponent {
            weight: 1.0,
            rho_a: rho_a.clone(),
            rho_b: rho_b.clone(),
        }])
        .unwrap();
        let mix = separable_mixture(&c).unwrap();
        let expect = kron(rho_a.matrix(), rho_b.matrix()).unwrap();
        assert!(mix.matrix().max_abs_diff(&expect) < 1e-15);

        // classically correlated diagonal
        let p0 = DensityOperator::single_party(ComplexMatrix::from_real(2, 2, &[1.0, 0.0, 0.0, 0.0])).unwrap();
        let p1 = DensityOperator::single_party(ComplexMatrix::from_real(2, 2, &[0.0, 0.0, 0.0, 1.0])).unwrap();
        let c = SeparableComponents::new(vec![
            SeparableComponent { weight: 0.5, rho_a: p0.clone(), rho_b: p0.clone() },
            SeparableComponent { weight: 0.5, rho_a: p1.clone(), rho_b: p1.clone() },
        ])
        .unwrap();
        let mix = separable_mixture(&c).unwrap();
        let expect = ComplexMatrix::diagonal(&[c64(0.5, 0.0), c64(0.0, 0.0), c64(0.0, 0.0), c64(0.5, 0.0)]);
        assert!(mix.matrix().max_abs_diff(&expect) < 1e-15);
    }

    #[test]
    fn separable_mixture_rejects_bad_weights_and_dims() {
        let q2 = DensityOperator::single_party(ComplexMatrix::identity(2).scale_re(0.5)).unwrap();
        let q3 = DensityOperator::single_party(ComplexMatrix::identity(3).scale_re(1.0 / 3.0)).unwrap();
        let bad_weights = SeparableComponents::new(vec![SeparableComponent {
            weight: 0.7,
            rho_a: q2.clone(),
            rho_b: q2.clone(),
        }]);
        assert!(matches!(bad_weights, Err(Error::Domain(_))));

        let mismatched = SeparableComponents::new(vec![
            SeparableComponent { weight: 0.5, rho_a: q2.clone(), rho_b: q2.clone() },
            SeparableComponent { weight: 0.5, rho_a: q3, rho_b: q2 },
        ]);
        assert!(matches!(mismatched, Err(Error::Shape(_))));
    }

    #[test]
    fn werner_quarter_reconstructed_from_product_decomposition() {
        let c = werner_product_decomposition(0.25).unwrap();
        assert_eq!(c.components().len(), 6);
        let mix = separable_mixture(&c).unwrap();
        let expect = werner_state(0.25).unwrap();
        assert!(mix.matrix().max_abs_diff(expect.matrix()) < 1e-12);
    }

    #[test]
    fn random_density_contracts() {
        let one = random_density(1, 5).unwrap();
        assert!(one.matrix().max_abs_diff(&ComplexMatrix::identity(1)) < 1e-15);

        let a = random_density(4, 1234).unwrap();
        let b = random_density(4, 1234).unwrap();
        assert_eq!(a.matrix(), b.matrix());

        for seed in 0..50u64 {
            let rho = random_density(4, seed).unwrap();
            let vals = hermitian_eigenvalues(rho.matrix(), 1e-9).unwrap();
            assert!(vals[0] >= -1e-12, "seed {seed} min eig {}", vals[0]);
            assert!((rho.matrix().trace().re - 1.0).abs() < 1e-12);
        }
    }

    #[test]
    fn joint_probabilities_examples() {
        let zz = ProjectiveMeasurement::computational(2);
        let phi = bell_state(BellKind::PhiPlus);
        let p = joint_probabilities(&phi, &zz, &zz).unwrap();
        assert!((p[0][0] - 0.5).abs() < 1e-14);
        assert!((p[1][1] - 0.5).abs() < 1e-14);
        assert!(p[0][1].abs() < 1e-14 && p[1][0].abs() < 1e-14);

        let zero = ComplexMatrix::from_real(2, 2, &[1.0, 0.0, 0.0, 0.0]);
        let prod = DensityOperator::new(
            kron(&zero, &zero).unwrap(),
            2,
            2,
        )
        .unwrap();
        let p = joint_probabilities(&prod, &zz, &zz).unwrap();
        assert!((p[0][0] - 1.0).abs() < 1e-14);
        assert!(p[0][1] + p[1][0] + p[1][1] < 1e-14);

        let white = maximally_mixed(2, 2);
        let mx = ProjectiveMeasurement::random(2, 3);
        let my = ProjectiveMeasurement::random(2, 4);
        let p = joint_probabilities(&white, &mx, &my).unwrap();
        for row in &p {
            for &v in row {
                assert!((v - 0.25).abs() < 1e-12);
            }
        }
    }

    #[test]
    fn joint_probability_marginals_match_reduced_state() {
        for seed in 0..20u64 {
            let rho = random_density(4, seed).unwrap().into_bipartite(2, 2).unwrap();
            let ma = ProjectiveMeasurement::random(2, split_seed(seed, 1));
            let mb = ProjectiveMeasurement::random(2, split_seed(seed, 2));
            let p = joint_probabilities(&rho, &ma, &mb).unwrap();
            let ra = reduced_state(&rho, Party::A).unwrap();
            for a in 0..2 {
                let marg: f64 = p[a].iter().sum();
                let local = trace_product(ra.matrix(), ma.projector(a)).re;
                assert!((marg - local).abs() < 1e-12);
            }
        }
    }

    #[test]
    fn reduced_state_examples() {
        for i in 0..=4 {
            let p = i as f64 / 4.0;
            let w = werner_state(p).unwrap();
            let ra = reduced_state(&w, Party::A).unwrap();
            assert!(ra.matrix().max_abs_diff(&ComplexMatrix::identity(2).scale_re(0.5)) < 1e-14);
        }
        let single = random_density(3, 9).unwrap();
        assert!(matches!(reduced_state(&single, Party::A), Err(Error::Shape(_))));
    }

    #[test]
    fn mixture_equality_is_an_identity() {
        let c = werner_product_decomposition(0.25).unwrap();
        let ma = ProjectiveMeasurement::random(2, 21);
        let mb = ProjectiveMeasurement::random(2, 22);
        let r = verify_mixture_equality(&c, &ma, &mb).unwrap();
        assert!(r <= 1e-12, "residual {r}");

        // single product component comes out even tighter
        let rho_a = random_density(2, 31).unwrap();
        let rho_b = random_density(2, 32).unwrap();
        let c = SeparableComponents::new(vec![SeparableComponent { weight: 1.0, rho_a, rho_b }]).unwrap();
        let r = verify_mixture_equality(&c, &ma, &mb).unwrap();
        assert!(r <= 1e-14, "residual {r}");
    }

    #[test]
    fn mixture_equality_over_random_components() {
        for seed in 0..100u64 {
            let c = random_separable(2, 2, 3, seed).unwrap();
            let ma = ProjectiveMeasurement::random(2, split_seed(seed, 100));
            let mb = ProjectiveMeasurement::random(2, split_seed(seed, 200));
            let r = verify_mixture_equality(&c, &ma, &mb).unwrap();
            assert!(r <= 1e-12, "seed {seed}: residual {r}");
        }
    }

    #[test]
    fn reduced_state_of_mixture_is_mixture_of_reduced() {
        let c = random_separable(2, 2, 4, 77).unwrap();
        let mix = separable_mixture(&c).unwrap();
        let ra = reduced_state(&mix, Party::A).unwrap();
        let mut expect = ComplexMatrix::zeros(2, 2);
        for comp in c.components() {
            expect = expect.add(&comp.rho_a.matrix().scale_re(comp.weight));
        }
        assert!(ra.matrix().max_abs_diff(&expect) < 1e-12);
    }

    #[test]
    fn measurement_validation_rejects_junk() {
        // non-idempotent
        let half = ComplexMatrix::identity(2).scale_re(0.5);
        let err = ProjectiveMeasurement::new(vec![half.clone(), half], vec!["a".into(), "b".into()]);
        assert!(matches!(err, Err(Error::Domain(_))));

        // incomplete
        let p0 = ComplexMatrix::from_real(2, 2, &[1.0, 0.0, 0.0, 0.0]);
        let err = ProjectiveMeasurement::new(vec![p0], vec!["a".into()]);
        assert!(matches!(err, Err(Error::Domain(_))));
    }

    #[test]
    fn bloch_measurement_has_sign_convention() {
        let m = ProjectiveMeasurement::along_bloch([0.0, 0.0, 1.0]).unwrap();
        assert_eq!(m.labels(), ["+", "-"]);
        // + projector along z is |0><0|
        assert!(m.projector(0).max_abs_diff(&ComplexMatrix::from_real(2, 2, &[1.0, 0.0, 0.0, 0.0])) < 1e-15);
    }
}
