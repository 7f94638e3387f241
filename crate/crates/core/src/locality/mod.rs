//! Behaviors, common-cause models, and the local polytope.
//!
//! A behavior is the full conditional distribution `P(a,b|x,y)` over
//! finitely many measurement settings. A common-cause model explains a
//! behavior as `sum_mu lambda_mu P(a|x,mu) P(b|y,mu)`: for each cause the
//! joint response factorizes, and the observed behavior is the mixture over
//! causes. Behaviors admitting such a model form a polytope whose vertices
//! are the deterministic strategies; membership is decided here by an exact
//! phase-1 simplex whose verdicts are re-verified against the vertex set, so
//! neither answer rests on solver internals.

use crate::error::{Error, Result};
use crate::linalg::{symmetric_eigen, trace_product};
use crate::quantum::{
    bloch_operator, joint_probabilities, pauli_x, pauli_y, pauli_z, DensityOperator,
    ProjectiveMeasurement,
};
use crate::rng::SplitMix64;

mod sampling;
mod simplex;

pub use sampling::{round_robin_schedule, sample_entry_range, sample_local_model, SampleOutcome};

/// Default tolerance for local-polytope membership (phase-1 objective).
pub const DEFAULT_LP_TOL: f64 = 1e-9;

/// Cap on the number of deterministic strategies a scenario may generate.
pub const MAX_STRATEGIES: u64 = 1_000_000;

/// A feasible verdict must reproduce the behavior this tightly.
const RECONSTRUCTION_TOL: f64 = 1e-8;

/// An infeasible verdict must separate by more than this after the dual is
/// re-verified against every vertex.
const GAP_TOL: f64 = 1e-8;

/// Measurement layout: settings per party and (uniform) outcomes per party.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Scenario {
    settings_a: usize,
    settings_b: usize,
    outcomes_a: usize,
    outcomes_b: usize,
}

impl Scenario {
    pub fn new(settings_a: usize, settings_b: usize, outcomes_a: usize, outcomes_b: usize) -> Result<Self> {
        if settings_a < 1 || settings_b < 1 {
            return Err(Error::Domain("each party needs at least one setting".into()));
        }
        if outcomes_a < 2 || outcomes_b < 2 {
            return Err(Error::Domain("each party needs at least two outcomes".into()));
        }
        let count = (outcomes_a as u128)
            .checked_pow(settings_a as u32)
            .and_then(|ca| (outcomes_b as u128).checked_pow(settings_b as u32).map(|cb| (ca, cb)))
            .and_then(|(ca, cb)| ca.checked_mul(cb));
        match count {
            Some(c) if c <= MAX_STRATEGIES as u128 => Ok(Self {
                settings_a,
                settings_b,
                outcomes_a,
                outcomes_b,
            }),
            _ => Err(Error::Size(format!(
                "deterministic strategy count {outcomes_a}^{settings_a} * {outcomes_b}^{settings_b} \
                 exceeds the cap of {MAX_STRATEGIES}"
            ))),
        }
    }

    /// The canonical two-setting, two-outcome scenario.
    pub fn chsh() -> Self {
        Self::new(2, 2, 2, 2).expect("2x2x2x2 is within the guard")
    }

    pub fn settings_a(&self) -> usize {
        self.settings_a
    }

    pub fn settings_b(&self) -> usize {
        self.settings_b
    }

    pub fn outcomes_a(&self) -> usize {
        self.outcomes_a
    }

    pub fn outcomes_b(&self) -> usize {
        self.outcomes_b
    }

    /// Number of probability entries `P(a,b|x,y)`.
    pub fn table_len(&self) -> usize {
        self.settings_a * self.settings_b * self.outcomes_a * self.outcomes_b
    }

    /// Number of deterministic strategies.
    pub fn strategy_count(&self) -> u64 {
        (self.outcomes_a as u64).pow(self.settings_a as u32)
            * (self.outcomes_b as u64).pow(self.settings_b as u32)
    }

    /// Flat index of `P(a,b|x,y)`.
    #[inline]
    pub fn index(&self, x: usize, y: usize, a: usize, b: usize) -> usize {
        ((x * self.settings_b + y) * self.outcomes_a + a) * self.outcomes_b + b
    }

    fn is_chsh_shaped(&self) -> bool {
        self.settings_a == 2 && self.settings_b == 2 && self.outcomes_a == 2 && self.outcomes_b == 2
    }
}

/// Conditional joint distribution `P(a,b|x,y)`, normalized per setting pair.
#[derive(Debug, Clone, PartialEq)]
pub struct BehaviorTable {
    scenario: Scenario,
    p: Vec<f64>,
}

impl BehaviorTable {
    pub fn new(scenario: Scenario, p: Vec<f64>) -> Result<Self> {
        if p.len() != scenario.table_len() {
            return Err(Error::Shape(format!(
                "behavior table needs {} entries, got {}",
                scenario.table_len(),
                p.len()
            )));
        }
        for (i, &v) in p.iter().enumerate() {
            if !v.is_finite() || v < -1e-12 || v > 1.0 + 1e-12 {
                return Err(Error::Domain(format!(
                    "entry {i} = {v} is outside [-1e-12, 1]"
                )));
            }
        }
        for x in 0..scenario.settings_a {
            for y in 0..scenario.settings_b {
                let mut total = 0.0;
                for a in 0..scenario.outcomes_a {
                    for b in 0..scenario.outcomes_b {
                        total += p[scenario.index(x, y, a, b)];
                    }
                }
                if (total - 1.0).abs() > 1e-10 {
                    return Err(Error::Consistency(format!(
                        "P(.,.|{x},{y}) sums to {total}, not 1 within 1e-10"
                    )));
                }
            }
        }
        Ok(Self { scenario, p })
    }

    pub fn scenario(&self) -> &Scenario {
        &self.scenario
    }

    pub fn entries(&self) -> &[f64] {
        &self.p
    }

    #[inline]
    pub fn get(&self, x: usize, y: usize, a: usize, b: usize) -> f64 {
        self.p[self.scenario.index(x, y, a, b)]
    }

    /// Marginal `P(a|x,y)` of party A.
    pub fn marginal_a(&self, x: usize, y: usize, a: usize) -> f64 {
        (0..self.scenario.outcomes_b).map(|b| self.get(x, y, a, b)).sum()
    }

    /// Marginal `P(b|x,y)` of party B.
    pub fn marginal_b(&self, x: usize, y: usize, b: usize) -> f64 {
        (0..self.scenario.outcomes_a).map(|a| self.get(x, y, a, b)).sum()
    }

    /// Two-outcome correlator `E(x,y)` with outcome 0 mapped to +1 and
    /// outcome 1 to -1 (label order).
    pub fn correlator(&self, x: usize, y: usize) -> Result<f64> {
        if self.scenario.outcomes_a != 2 || self.scenario.outcomes_b != 2 {
            return Err(Error::Shape(
                "correlators are defined for two-outcome scenarios".into(),
            ));
        }
        Ok(self.get(x, y, 0, 0) - self.get(x, y, 0, 1) - self.get(x, y, 1, 0) + self.get(x, y, 1, 1))
    }
}

/// A common-cause model: weights over causes, and per-cause local response
/// distributions for each setting.
#[derive(Debug, Clone, PartialEq)]
pub struct LocalModel {
    scenario: Scenario,
    weights: Vec<f64>,
    /// `response_a[mu][x][a] = P(a|x,mu)`
    response_a: Vec<Vec<Vec<f64>>>,
    /// `response_b[mu][y][b] = P(b|y,mu)`
    response_b: Vec<Vec<Vec<f64>>>,
}

impl LocalModel {
    pub fn new(
        scenario: Scenario,
        weights: Vec<f64>,
        response_a: Vec<Vec<Vec<f64>>>,
        response_b: Vec<Vec<Vec<f64>>>,
    ) -> Result<Self> {
        if weights.is_empty() {
            return Err(Error::Domain("a model needs at least one cause".into()));
        }
        let k = weights.len();
        let mut total = 0.0;
        for (mu, &w) in weights.iter().enumerate() {
            if !(w.is_finite() && w >= 0.0) {
                return Err(Error::Domain(format!("weight of cause {mu} is {w}")));
            }
            total += w;
        }
        if (total - 1.0).abs() > 1e-12 {
            return Err(Error::Domain(format!(
                "cause weights must sum to 1 within 1e-12, got {total}"
            )));
        }
        check_responses("A", &response_a, k, scenario.settings_a, scenario.outcomes_a)?;
        check_responses("B", &response_b, k, scenario.settings_b, scenario.outcomes_b)?;
        Ok(Self {
            scenario,
            weights,
            response_a,
            response_b,
        })
    }

    pub fn scenario(&self) -> &Scenario {
        &self.scenario
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    pub fn cause_count(&self) -> usize {
        self.weights.len()
    }

    pub fn response_a(&self) -> &[Vec<Vec<f64>>] {
        &self.response_a
    }

    pub fn response_b(&self) -> &[Vec<Vec<f64>>] {
        &self.response_b
    }
}

fn check_responses(
    party: &str,
    responses: &[Vec<Vec<f64>>],
    causes: usize,
    settings: usize,
    outcomes: usize,
) -> Result<()> {
    if responses.len() != causes {
        return Err(Error::Shape(format!(
            "party {party}: {} response tables for {causes} causes",
            responses.len()
        )));
    }
    for (mu, table) in responses.iter().enumerate() {
        if table.len() != settings {
            return Err(Error::Shape(format!(
                "party {party}, cause {mu}: {} rows for {settings} settings",
                table.len()
            )));
        }
        for (x, row) in table.iter().enumerate() {
            if row.len() != outcomes {
                return Err(Error::Shape(format!(
                    "party {party}, cause {mu}, setting {x}: {} entries for {outcomes} outcomes",
                    row.len()
                )));
            }
            let mut total = 0.0;
            for &v in row {
                if !(v.is_finite() && v >= -1e-12) {
                    return Err(Error::Domain(format!(
                        "party {party}, cause {mu}, setting {x}: probability {v}"
                    )));
                }
                total += v;
            }
            if (total - 1.0).abs() > 1e-12 {
                return Err(Error::Domain(format!(
                    "party {party}, cause {mu}, setting {x}: row sums to {total}"
                )));
            }
        }
    }
    Ok(())
}

/// Outcome of a local-polytope membership test. Both arms carry certificates
/// that have been checked independently of the solver: feasible weights
/// reproduce the behavior through the strategy matrix, and an infeasible
/// dual has been evaluated against every enumerated vertex.
#[derive(Debug, Clone)]
pub enum LhvResult {
    Feasible {
        /// Distribution over deterministic strategies, in enumeration order.
        weights: Vec<f64>,
        /// `max_i |(D w - p)_i|` recomputed from the returned weights.
        reconstruction_error: f64,
    },
    Infeasible {
        dual: DualWitness,
        /// `dual.evaluate(behavior) - dual.bound`, strictly positive.
        gap: f64,
    },
}

impl LhvResult {
    pub fn is_feasible(&self) -> bool {
        matches!(self, Self::Feasible { .. })
    }
}

/// A separating linear functional: `coefficients . p <= bound` holds for
/// every deterministic strategy (hence for the whole polytope), and the
/// tested behavior exceeds the bound. Coefficients are indexed like the
/// behavior table and normalized to unit max magnitude.
#[derive(Debug, Clone)]
pub struct DualWitness {
    pub coefficients: Vec<f64>,
    pub bound: f64,
}

impl DualWitness {
    pub fn evaluate(&self, b: &BehaviorTable) -> f64 {
        self.coefficients
            .iter()
            .zip(b.entries())
            .map(|(c, p)| c * p)
            .sum()
    }
}

/// Behavior of a quantum state under one list of settings per party, filled
/// with Born-rule joint probabilities setting pair by setting pair.
pub fn behavior_from_state(
    rho: &DensityOperator,
    meas_a: &[ProjectiveMeasurement],
    meas_b: &[ProjectiveMeasurement],
) -> Result<BehaviorTable> {
    if meas_a.is_empty() || meas_b.is_empty() {
        return Err(Error::Shape("each party needs at least one setting".into()));
    }
    let oa = meas_a[0].outcomes();
    let ob = meas_b[0].outcomes();
    if meas_a.iter().any(|m| m.outcomes() != oa) || meas_b.iter().any(|m| m.outcomes() != ob) {
        return Err(Error::Shape(
            "outcome counts must be uniform across settings".into(),
        ));
    }
    let scenario = Scenario::new(meas_a.len(), meas_b.len(), oa, ob)?;
    let mut p = vec![0.0; scenario.table_len()];
    for (x, ma) in meas_a.iter().enumerate() {
        for (y, mb) in meas_b.iter().enumerate() {
            let joint = joint_probabilities(rho, ma, mb)?;
            for a in 0..oa {
                for b in 0..ob {
                    p[scenario.index(x, y, a, b)] = joint[a][b];
                }
            }
        }
    }
    BehaviorTable::new(scenario, p)
}

/// Largest deviation of a single joint distribution from the product of its
/// marginals: zero exactly when the joint factorizes.
pub fn factorization_residual(joint: &[Vec<f64>], marg_a: &[f64], marg_b: &[f64]) -> Result<f64> {
    if joint.len() != marg_a.len() || joint.iter().any(|row| row.len() != marg_b.len()) {
        return Err(Error::Shape(
            "joint table shape must match the marginal lengths".into(),
        ));
    }
    let total: f64 = joint.iter().flatten().sum();
    if (total - 1.0).abs() > 1e-10 {
        return Err(Error::Domain(format!(
            "joint table sums to {total}, not a distribution"
        )));
    }
    for (a, row) in joint.iter().enumerate() {
        let sum: f64 = row.iter().sum();
        if (sum - marg_a[a]).abs() > 1e-8 {
            return Err(Error::Consistency(format!(
                "row {a} sums to {sum} but the A-marginal says {}",
                marg_a[a]
            )));
        }
    }
    for b in 0..marg_b.len() {
        let sum: f64 = joint.iter().map(|row| row[b]).sum();
        if (sum - marg_b[b]).abs() > 1e-8 {
            return Err(Error::Consistency(format!(
                "column {b} sums to {sum} but the B-marginal says {}",
                marg_b[b]
            )));
        }
    }
    let mut worst = 0.0f64;
    for (a, row) in joint.iter().enumerate() {
        for (b, &v) in row.iter().enumerate() {
            worst = worst.max((v - marg_a[a] * marg_b[b]).abs());
        }
    }
    Ok(worst)
}

/// Mixes a common-cause model into its behavior:
/// `P(a,b|x,y) = sum_mu lambda_mu P(a|x,mu) P(b|y,mu)`.
pub fn mix_local_model(model: &LocalModel) -> Result<BehaviorTable> {
    let s = *model.scenario();
    let mut p = vec![0.0; s.table_len()];
    for (mu, &w) in model.weights().iter().enumerate() {
        for x in 0..s.settings_a() {
            for y in 0..s.settings_b() {
                for a in 0..s.outcomes_a() {
                    let pa = model.response_a()[mu][x][a];
                    for b in 0..s.outcomes_b() {
                        p[s.index(x, y, a, b)] += w * pa * model.response_b()[mu][y][b];
                    }
                }
            }
        }
    }
    BehaviorTable::new(s, p)
}

/// Decodes the big-endian assignment digits of strategy component `index`:
/// `out[x]` is the outcome assigned to setting `x`.
fn assignment(index: u64, settings: usize, outcomes: usize) -> Vec<usize> {
    let mut digits = vec![0usize; settings];
    let mut rest = index;
    for x in (0..settings).rev() {
        digits[x] = (rest % outcomes as u64) as usize;
        rest /= outcomes as u64;
    }
    digits
}

/// All deterministic strategies of a scenario, one behavior per strategy.
///
/// Enumeration order: strategy `s = i_A * outcomes_b^settings_b + i_B`, where
/// `i_A` walks A-assignments lexicographically over `(a(0), a(1), ...)` and
/// `i_B` does the same for B. Entries are exactly 0 or 1 and every setting
/// pair factorizes (point-mass cause).
pub fn enumerate_deterministic_strategies(scenario: &Scenario) -> Vec<BehaviorTable> {
    let s = *scenario;
    let count_a = (s.outcomes_a() as u64).pow(s.settings_a() as u32);
    let count_b = (s.outcomes_b() as u64).pow(s.settings_b() as u32);
    let mut out = Vec::with_capacity((count_a * count_b) as usize);
    for ia in 0..count_a {
        let assign_a = assignment(ia, s.settings_a(), s.outcomes_a());
        for ib in 0..count_b {
            let assign_b = assignment(ib, s.settings_b(), s.outcomes_b());
            let mut p = vec![0.0; s.table_len()];
            for x in 0..s.settings_a() {
                for y in 0..s.settings_b() {
                    p[s.index(x, y, assign_a[x], assign_b[y])] = 1.0;
                }
            }
            out.push(BehaviorTable::new(s, p).expect("deterministic table is valid"));
        }
    }
    out
}

/// Decides membership of a behavior in the local polytope by phase-1 simplex
/// over the vertex-weight formulation: find `q >= 0`, `sum q = 1`, `D q = p`
/// with `D` the matrix of deterministic behaviors. Infeasibility smaller
/// than `tol` counts as membership.
pub fn lhv_membership(behavior: &BehaviorTable, tol: f64) -> Result<LhvResult> {
    let strategies = enumerate_deterministic_strategies(behavior.scenario());
    let m = behavior.scenario().table_len();
    let k = strategies.len();
    let rows = m + 1;

    let mut a = vec![0.0f64; rows * k];
    for (s, strat) in strategies.iter().enumerate() {
        for (r, &v) in strat.entries().iter().enumerate() {
            a[r * k + s] = v;
        }
        a[m * k + s] = 1.0;
    }
    // round-off negatives (within the table invariant's -1e-12 band) are
    // clamped so the Farkas multipliers keep the original row orientation
    let mut rhs: Vec<f64> = behavior.entries().iter().map(|&v| v.max(0.0)).collect();
    rhs.push(1.0);

    match simplex::equality_feasibility(rows, k, &a, &rhs, tol)? {
        simplex::Feasibility::Feasible { x } => {
            let mut reconstruction_error = 0.0f64;
            for r in 0..m {
                let mut acc = 0.0;
                for (s, strat) in strategies.iter().enumerate() {
                    acc += strat.entries()[r] * x[s];
                }
                reconstruction_error = reconstruction_error.max((acc - behavior.entries()[r]).abs());
            }
            if reconstruction_error > RECONSTRUCTION_TOL {
                return Err(Error::Numeric(format!(
                    "solver reported feasible but the weights reproduce the behavior only to \
                     {reconstruction_error:.3e}"
                )));
            }
            Ok(LhvResult::Feasible {
                weights: x,
                reconstruction_error,
            })
        }
        simplex::Feasibility::Infeasible { y } => {
            // separating functional from the multipliers of the behavior
            // rows, canonicalized: every behavior has unit block sums, so
            // the per-setting mean of the coefficients is pure gauge and is
            // removed before scaling to unit max magnitude
            let mut coefficients: Vec<f64> = y[..m].to_vec();
            let s = behavior.scenario();
            let block = s.outcomes_a() * s.outcomes_b();
            for chunk in coefficients.chunks_mut(block) {
                let mean: f64 = chunk.iter().sum::<f64>() / block as f64;
                for c in chunk.iter_mut() {
                    *c -= mean;
                }
            }
            let scale = coefficients.iter().map(|c| c.abs()).fold(0.0, f64::max);
            if scale <= 0.0 {
                return Err(Error::Numeric(
                    "solver reported infeasible but produced a vanishing dual".into(),
                ));
            }
            for c in &mut coefficients {
                *c /= scale;
            }
            // re-verify against every vertex; the certified bound is the
            // actual maximum over strategies, not the solver's claim
            let mut bound = f64::NEG_INFINITY;
            for strat in &strategies {
                let v: f64 = coefficients
                    .iter()
                    .zip(strat.entries())
                    .map(|(c, p)| c * p)
                    .sum();
                bound = bound.max(v);
            }
            let value: f64 = coefficients
                .iter()
                .zip(behavior.entries())
                .map(|(c, p)| c * p)
                .sum();
            let gap = value - bound;
            if gap <= GAP_TOL {
                return Err(Error::Numeric(format!(
                    "solver reported infeasible but the verified dual gap is only {gap:.3e}"
                )));
            }
            Ok(LhvResult::Infeasible {
                dual: DualWitness { coefficients, bound },
                gap,
            })
        }
    }
}

/// CHSH combination `S = E(0,0) + E(0,1) + E(1,0) - E(1,1)` for a
/// two-setting, two-outcome behavior; outcomes map to +-1 in label order.
pub fn chsh_value(behavior: &BehaviorTable) -> Result<f64> {
    if !behavior.scenario().is_chsh_shaped() {
        return Err(Error::Shape(
            "CHSH needs two settings and two outcomes per party".into(),
        ));
    }
    Ok(behavior.correlator(0, 0)? + behavior.correlator(0, 1)? + behavior.correlator(1, 0)?
        - behavior.correlator(1, 1)?)
}

/// Largest value of any of the eight CHSH sign patterns (one correlator
/// negated, up to overall sign). For a no-signaling two-setting two-outcome
/// behavior, membership in the local polytope is equivalent to all eight
/// staying at or below 2.
pub fn chsh_symmetrized_max(behavior: &BehaviorTable) -> Result<f64> {
    let e = [
        [behavior.correlator(0, 0)?, behavior.correlator(0, 1)?],
        [behavior.correlator(1, 0)?, behavior.correlator(1, 1)?],
    ];
    let mut best = f64::NEG_INFINITY;
    for flip in 0..4usize {
        let (fx, fy) = (flip / 2, flip % 2);
        let mut s = 0.0;
        for x in 0..2 {
            for y in 0..2 {
                let sign = if x == fx && y == fy { -1.0 } else { 1.0 };
                s += sign * e[x][y];
            }
        }
        best = best.max(s.abs());
    }
    Ok(best)
}

/// Two-qubit correlation matrix `T[k][l] = Tr(rho sigma_k (x) sigma_l)`.
pub fn correlation_matrix(rho: &DensityOperator) -> Result<[[f64; 3]; 3]> {
    if rho.dim_a() != 2 || rho.dim_b() != 2 {
        return Err(Error::Shape("correlation matrix needs a two-qubit state".into()));
    }
    let paulis = [pauli_x(), pauli_y(), pauli_z()];
    let mut t = [[0.0; 3]; 3];
    for (k, sk) in paulis.iter().enumerate() {
        for (l, sl) in paulis.iter().enumerate() {
            let op = crate::linalg::kron(sk, sl)?;
            t[k][l] = trace_product(rho.matrix(), &op).re;
        }
    }
    Ok(t)
}

fn matvec3(t: &[[f64; 3]; 3], v: [f64; 3]) -> [f64; 3] {
    [
        t[0][0] * v[0] + t[0][1] * v[1] + t[0][2] * v[2],
        t[1][0] * v[0] + t[1][1] * v[1] + t[1][2] * v[2],
        t[2][0] * v[0] + t[2][1] * v[1] + t[2][2] * v[2],
    ]
}

fn norm3(v: [f64; 3]) -> f64 {
    (v[0] * v[0] + v[1] * v[1] + v[2] * v[2]).sqrt()
}

fn scale3(v: [f64; 3], s: f64) -> [f64; 3] {
    [v[0] * s, v[1] * s, v[2] * s]
}

fn add3(u: [f64; 3], v: [f64; 3]) -> [f64; 3] {
    [u[0] + v[0], u[1] + v[1], u[2] + v[2]]
}

/// Any unit vector orthogonal to `a` (assumed unit).
fn orthogonal_unit(a: [f64; 3]) -> [f64; 3] {
    let axis = if a[0].abs() <= a[1].abs() && a[0].abs() <= a[2].abs() {
        [1.0, 0.0, 0.0]
    } else if a[1].abs() <= a[2].abs() {
        [0.0, 1.0, 0.0]
    } else {
        [0.0, 0.0, 1.0]
    };
    let dot = axis[0] * a[0] + axis[1] * a[1] + axis[2] * a[2];
    let v = add3(axis, scale3(a, -dot));
    scale3(v, 1.0 / norm3(v))
}

/// Largest CHSH value reachable with projective measurements:
/// `2 sqrt(t1 + t2)` from the two largest eigenvalues of `T^T T`.
pub fn chsh_max(rho: &DensityOperator) -> Result<f64> {
    let t = correlation_matrix(rho)?;
    let (t1, t2) = top_two_eigenvalues(&t)?;
    Ok(2.0 * (t1 + t2).max(0.0).sqrt())
}

fn top_two_eigenvalues(t: &[[f64; 3]; 3]) -> Result<(f64, f64)> {
    let m = gram(t);
    let eig = symmetric_eigen(3, &m, 1e-14)?;
    Ok((eig.values[2], eig.values[1]))
}

fn gram(t: &[[f64; 3]; 3]) -> [f64; 9] {
    let mut m = [0.0; 9];
    for i in 0..3 {
        for j in 0..3 {
            let mut acc = 0.0;
            for k in 0..3 {
                acc += t[k][i] * t[k][j];
            }
            m[i * 3 + j] = acc;
        }
    }
    m
}

/// Measurement settings achieving `chsh_max` for a two-qubit state, built
/// from the top two eigenvectors of `T^T T`. The returned behavior satisfies
/// `chsh_value = chsh_max` up to eigensolver accuracy.
pub fn chsh_optimal_settings(
    rho: &DensityOperator,
) -> Result<(Vec<ProjectiveMeasurement>, Vec<ProjectiveMeasurement>)> {
    let t = correlation_matrix(rho)?;
    let eig = symmetric_eigen(3, &gram(&t), 1e-14)?;
    let u = [eig.vectors[2][0], eig.vectors[2][1], eig.vectors[2][2]];
    let v = [eig.vectors[1][0], eig.vectors[1][1], eig.vectors[1][2]];
    let tu = matvec3(&t, u);
    let tv = matvec3(&t, v);
    let nu = norm3(tu);
    let nv = norm3(tv);

    let a0 = if nu > 1e-12 { scale3(tu, 1.0 / nu) } else { [0.0, 0.0, 1.0] };
    let a1 = if nv > 1e-12 { scale3(tv, 1.0 / nv) } else { orthogonal_unit(a0) };
    let hyp = (nu * nu + nv * nv).sqrt();
    let (cos_chi, sin_chi) = if hyp > 1e-12 {
        (nu / hyp, nv / hyp)
    } else {
        (std::f64::consts::FRAC_1_SQRT_2, std::f64::consts::FRAC_1_SQRT_2)
    };
    let b0 = add3(scale3(u, cos_chi), scale3(v, sin_chi));
    let b1 = add3(scale3(u, cos_chi), scale3(v, -sin_chi));

    let alice = vec![
        ProjectiveMeasurement::along_bloch(a0)?,
        ProjectiveMeasurement::along_bloch(a1)?,
    ];
    let bob = vec![
        ProjectiveMeasurement::along_bloch(b0)?,
        ProjectiveMeasurement::along_bloch(b1)?,
    ];
    Ok((alice, bob))
}

/// The textbook CHSH settings, oriented so that the singlet behavior comes
/// out at `S = +2 sqrt(2)`: A measures along z and x, B along `-(z+x)/sqrt2`
/// and `(x-z)/sqrt2`.
pub fn canonical_chsh_settings() -> (Vec<ProjectiveMeasurement>, Vec<ProjectiveMeasurement>) {
    let s = std::f64::consts::FRAC_1_SQRT_2;
    let alice = vec![
        ProjectiveMeasurement::along_bloch([0.0, 0.0, 1.0]).expect("unit axis"),
        ProjectiveMeasurement::along_bloch([1.0, 0.0, 0.0]).expect("unit axis"),
    ];
    let bob = vec![
        ProjectiveMeasurement::along_bloch([-s, 0.0, -s]).expect("unit axis"),
        ProjectiveMeasurement::along_bloch([s, 0.0, -s]).expect("unit axis"),
    ];
    (alice, bob)
}

/// Largest change of any party's marginal when the other party switches
/// settings; zero for every behavior that admits the mixture form, and for
/// every Born-rule behavior (completeness of the projector sets removes the
/// remote setting from the marginal).
pub fn no_signaling_residual(behavior: &BehaviorTable) -> f64 {
    let s = behavior.scenario();
    let mut worst = 0.0f64;
    for x in 0..s.settings_a() {
        for a in 0..s.outcomes_a() {
            for y1 in 0..s.settings_b() {
                for y2 in (y1 + 1)..s.settings_b() {
                    let d = (behavior.marginal_a(x, y1, a) - behavior.marginal_a(x, y2, a)).abs();
                    worst = worst.max(d);
                }
            }
        }
    }
    for y in 0..s.settings_b() {
        for b in 0..s.outcomes_b() {
            for x1 in 0..s.settings_a() {
                for x2 in (x1 + 1)..s.settings_a() {
                    let d = (behavior.marginal_b(x1, y, b) - behavior.marginal_b(x2, y, b)).abs();
                    worst = worst.max(d);
                }
            }
        }
    }
    worst
}

/// Seeded random common-cause model: normalized uniform weights and
/// normalized uniform response rows. Property-test input generator.
pub fn random_local_model(scenario: &Scenario, causes: usize, seed: u64) -> Result<LocalModel> {
    if causes == 0 {
        return Err(Error::Domain("need at least one cause".into()));
    }
    let mut rng = SplitMix64::new(seed);
    let mut weights: Vec<f64> = (0..causes).map(|_| rng.next_f64_open()).collect();
    let total: f64 = weights.iter().sum();
    for w in &mut weights {
        *w /= total;
    }
    let mut rows = |settings: usize, outcomes: usize| -> Vec<Vec<Vec<f64>>> {
        (0..causes)
            .map(|_| {
                (0..settings)
                    .map(|_| {
                        let mut row: Vec<f64> = (0..outcomes).map(|_| rng.next_f64_open()).collect();
                        let s: f64 = row.iter().sum();
                        for v in &mut row {
                            *v /= s;
                        }
                        row
                    })
                    .collect()
            })
            .collect()
    };
    let response_a = rows(scenario.settings_a(), scenario.outcomes_a());
    let response_b = rows(scenario.settings_b(), scenario.outcomes_b());
    LocalModel::new(*scenario, weights, response_a, response_b)
}

/// `n . sigma` helper re-exported for settings construction in tests.
pub fn bloch_axis_operator(n: [f64; 3]) -> crate::linalg::ComplexMatrix {
    bloch_operator(n)
}
