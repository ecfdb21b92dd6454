//! Bell scenarios, behaviors, input distributions and deterministic
//! strategies.
//!
//! A behavior is stored as a flat vector indexed by `(x⃗, a⃗)` in
//! lexicographic order, input tuple major, output tuple minor, party 1 most
//! significant within each group. Every module of the crate uses this one
//! convention; [`Scenario::flat_index`] is the only place that defines it.

use alloc::vec;
use alloc::vec::Vec;

use crate::{Error, Result, DIMENSION_CAP, FEAS_TOL, STRATEGY_CAP};

/// A Bell scenario: the number of inputs and outputs of every party.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Scenario {
    inputs: Vec<usize>,
    outputs: Vec<usize>,
}

impl Scenario {
    /// Scenario with `inputs[k]` measurement settings and `outputs[k]`
    /// outcomes for party `k`.
    pub fn new(inputs: Vec<usize>, outputs: Vec<usize>) -> Result<Self> {
        if inputs.is_empty() || inputs.len() != outputs.len() {
            return Err(Error::DegenerateScenario);
        }
        if inputs.iter().chain(outputs.iter()).any(|&v| v == 0) {
            return Err(Error::DegenerateScenario);
        }
        let dim: u128 = inputs
            .iter()
            .chain(outputs.iter())
            .map(|&v| v as u128)
            .product();
        if dim > DIMENSION_CAP as u128 {
            return Err(Error::ScenarioTooLarge {
                dim,
                cap: DIMENSION_CAP,
            });
        }
        Ok(Scenario { inputs, outputs })
    }

    /// `parties` parties, each with `m` inputs of `d` outcomes.
    pub fn symmetric(parties: usize, m: usize, d: usize) -> Result<Self> {
        Scenario::new(vec![m; parties], vec![d; parties])
    }

    /// The bipartite two-input/two-output (CHSH) scenario.
    pub fn chsh() -> Self {
        Scenario::symmetric(2, 2, 2).expect("tiny scenario")
    }

    pub fn parties(&self) -> usize {
        self.inputs.len()
    }

    pub fn inputs(&self) -> &[usize] {
        &self.inputs
    }

    pub fn outputs(&self) -> &[usize] {
        &self.outputs
    }

    /// Number of input tuples `Π_k m_k`.
    pub fn input_tuples(&self) -> usize {
        self.inputs.iter().product()
    }

    /// Number of output tuples `Π_k d_k`.
    pub fn output_tuples(&self) -> usize {
        self.outputs.iter().product()
    }

    /// Behavior vector length `n = Π_k m_k · Π_k d_k`.
    pub fn dimension(&self) -> usize {
        self.input_tuples() * self.output_tuples()
    }

    /// Number of local deterministic strategies `Π_k d_k^{m_k}`.
    pub fn strategy_count(&self) -> Result<usize> {
        let mut count: u128 = 1;
        for (&m, &d) in self.inputs.iter().zip(&self.outputs) {
            for _ in 0..m {
                count = count.saturating_mul(d as u128);
            }
            if count > STRATEGY_CAP as u128 {
                return Err(Error::StrategyCapacity {
                    count,
                    cap: STRATEGY_CAP,
                });
            }
        }
        Ok(count as usize)
    }

    /// Mixed-radix encoding of an input tuple, party 1 most significant.
    pub fn input_tuple_index(&self, x: &[usize]) -> Result<usize> {
        encode_tuple(x, &self.inputs)
    }

    /// Mixed-radix encoding of an output tuple, party 1 most significant.
    pub fn output_tuple_index(&self, a: &[usize]) -> Result<usize> {
        encode_tuple(a, &self.outputs)
    }

    /// Flat behavior index of `(x⃗, a⃗)`: input tuple major, output minor.
    pub fn flat_index(&self, x: &[usize], a: &[usize]) -> Result<usize> {
        Ok(self.input_tuple_index(x)? * self.output_tuples() + self.output_tuple_index(a)?)
    }

    /// Inverse of [`Scenario::flat_index`].
    pub fn split_index(&self, idx: usize) -> (Vec<usize>, Vec<usize>) {
        debug_assert!(idx < self.dimension());
        let ot = self.output_tuples();
        let x = decode_tuple(idx / ot, &self.inputs);
        let a = decode_tuple(idx % ot, &self.outputs);
        (x, a)
    }

    /// Iterate all input tuples in lexicographic order.
    pub fn input_tuples_iter(&self) -> TupleIter {
        TupleIter::new_for(self.inputs.clone())
    }

    /// Iterate all output tuples in lexicographic order.
    pub fn output_tuples_iter(&self) -> TupleIter {
        TupleIter::new_for(self.outputs.clone())
    }
}

fn encode_tuple(t: &[usize], radix: &[usize]) -> Result<usize> {
    if t.len() != radix.len() {
        return Err(Error::DimensionMismatch {
            expected: radix.len(),
            got: t.len(),
        });
    }
    let mut idx = 0usize;
    for (party, (&v, &r)) in t.iter().zip(radix).enumerate() {
        if v >= r {
            return Err(Error::IndexOutOfRange {
                party,
                value: v,
                limit: r,
            });
        }
        idx = idx * r + v;
    }
    Ok(idx)
}

fn decode_tuple(mut idx: usize, radix: &[usize]) -> Vec<usize> {
    let mut t = vec![0usize; radix.len()];
    for k in (0..radix.len()).rev() {
        t[k] = idx % radix[k];
        idx /= radix[k];
    }
    t
}

/// Lexicographic iterator over mixed-radix tuples.
pub struct TupleIter {
    radix: Vec<usize>,
    current: Vec<usize>,
    done: bool,
}

impl TupleIter {
    pub(crate) fn new_for(radix: Vec<usize>) -> Self {
        let current = vec![0; radix.len()];
        TupleIter {
            radix,
            current,
            done: false,
        }
    }
}

impl Iterator for TupleIter {
    type Item = Vec<usize>;

    fn next(&mut self) -> Option<Vec<usize>> {
        if self.done {
            return None;
        }
        let out = self.current.clone();
        let mut k = self.radix.len();
        loop {
            if k == 0 {
                self.done = true;
                break;
            }
            k -= 1;
            self.current[k] += 1;
            if self.current[k] < self.radix[k] {
                break;
            }
            self.current[k] = 0;
        }
        Some(out)
    }
}

/// A probability distribution over the input tuples of a scenario.
#[derive(Debug, Clone, PartialEq)]
pub struct InputDistribution {
    scenario: Scenario,
    weights: Vec<f64>,
}

impl InputDistribution {
    /// Uniform weights `1/Π_k m_k`.
    pub fn uniform(scenario: Scenario) -> Self {
        let nt = scenario.input_tuples();
        InputDistribution {
            scenario,
            weights: vec![1.0 / nt as f64; nt],
        }
    }

    /// Explicit weights over input tuples in lexicographic order.
    pub fn from_weights(scenario: Scenario, weights: Vec<f64>) -> Result<Self> {
        if weights.len() != scenario.input_tuples() {
            return Err(Error::DimensionMismatch {
                expected: scenario.input_tuples(),
                got: weights.len(),
            });
        }
        if weights.iter().any(|&w| w < 0.0 || !w.is_finite()) {
            return Err(Error::Domain("input weights must be non-negative".into()));
        }
        let sum: f64 = weights.iter().sum();
        if (sum - 1.0).abs() > 1e-12 {
            return Err(Error::Domain(alloc::format!(
                "input weights sum to {sum}, expected 1"
            )));
        }
        Ok(InputDistribution { scenario, weights })
    }

    /// Equal weight on the listed input tuples, zero elsewhere.
    pub fn supported_on(scenario: Scenario, tuples: &[Vec<usize>]) -> Result<Self> {
        let mut weights = vec![0.0; scenario.input_tuples()];
        for t in tuples {
            weights[scenario.input_tuple_index(t)?] = 1.0 / tuples.len() as f64;
        }
        InputDistribution::from_weights(scenario, weights)
    }

    pub fn scenario(&self) -> &Scenario {
        &self.scenario
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    /// Weight of the input tuple with lexicographic index `xi`.
    pub fn weight(&self, xi: usize) -> f64 {
        self.weights[xi]
    }
}

/// Validity report for a candidate behavior.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ValidationReport {
    pub valid: bool,
    /// Largest absolute breach of non-negativity or normalization.
    pub max_violation: f64,
}

/// A conditional outcome distribution `p(a⃗|x⃗)` on a scenario.
#[derive(Debug, Clone, PartialEq)]
pub struct Behavior {
    scenario: Scenario,
    values: Vec<f64>,
}

impl Behavior {
    /// Wrap a flat vector without validity checks.
    pub fn from_values(scenario: Scenario, values: Vec<f64>) -> Result<Self> {
        if values.len() != scenario.dimension() {
            return Err(Error::DimensionMismatch {
                expected: scenario.dimension(),
                got: values.len(),
            });
        }
        Ok(Behavior { scenario, values })
    }

    /// Build entrywise from `f(x⃗, a⃗)`.
    pub fn from_fn(scenario: Scenario, mut f: impl FnMut(&[usize], &[usize]) -> f64) -> Self {
        let n = scenario.dimension();
        let mut values = Vec::with_capacity(n);
        for x in scenario.input_tuples_iter() {
            for a in scenario.output_tuples_iter() {
                values.push(f(&x, &a));
            }
        }
        Behavior { scenario, values }
    }

    /// The maximally mixed behavior `u(a⃗|x⃗) = 1/Π_k d_k`.
    pub fn uniform(scenario: Scenario) -> Self {
        let p = 1.0 / scenario.output_tuples() as f64;
        let n = scenario.dimension();
        Behavior {
            scenario,
            values: vec![p; n],
        }
    }

    pub fn scenario(&self) -> &Scenario {
        &self.scenario
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn values_mut(&mut self) -> &mut [f64] {
        &mut self.values
    }

    pub fn prob(&self, x: &[usize], a: &[usize]) -> Result<f64> {
        Ok(self.values[self.scenario.flat_index(x, a)?])
    }

    /// Non-negativity and per-input normalization at the given tolerance.
    pub fn validate(&self, tol: f64) -> ValidationReport {
        let mut max_violation: f64 = 0.0;
        let ot = self.scenario.output_tuples();
        for block in self.values.chunks(ot) {
            let mut sum = 0.0;
            for &v in block {
                sum += v;
                if v < 0.0 {
                    max_violation = max_violation.max(-v);
                }
            }
            max_violation = max_violation.max((sum - 1.0).abs());
        }
        ValidationReport {
            valid: max_violation <= tol,
            max_violation,
        }
    }

    /// Largest violation of the non-signaling constraints: for every party,
    /// the marginal over that party's outcome must not depend on its input.
    pub fn ns_violation(&self) -> f64 {
        let scen = &self.scenario;
        let mut worst: f64 = 0.0;
        for party in 0..scen.parties() {
            let m_k = scen.inputs[party];
            let d_k = scen.outputs[party];
            if m_k < 2 {
                continue;
            }
            // Radices of the joint marginal index (inputs and outcomes of
            // everyone but `party`).
            let mut radix: Vec<usize> = Vec::new();
            for (j, &m) in scen.inputs.iter().enumerate() {
                if j != party {
                    radix.push(m);
                }
            }
            for (j, &d) in scen.outputs.iter().enumerate() {
                if j != party {
                    radix.push(d);
                }
            }
            let others = scen.parties() - 1;
            for rest in TupleIter::new_for(radix) {
                let (x_rest, a_rest) = rest.split_at(others);
                let mut x = Vec::with_capacity(scen.parties());
                let mut a = Vec::with_capacity(scen.parties());
                let mut r = 0;
                for j in 0..scen.parties() {
                    if j == party {
                        x.push(0);
                        a.push(0);
                    } else {
                        x.push(x_rest[r]);
                        a.push(a_rest[r]);
                        r += 1;
                    }
                }
                let mut reference = 0.0;
                for xk in 0..m_k {
                    x[party] = xk;
                    let mut marg = 0.0;
                    for ak in 0..d_k {
                        a[party] = ak;
                        marg += self.values[self.scenario.flat_index(&x, &a).unwrap()];
                    }
                    if xk == 0 {
                        reference = marg;
                    } else {
                        worst = worst.max((marg - reference).abs());
                    }
                }
            }
        }
        worst
    }

    /// Joint distribution `π(x⃗)·q(a⃗|x⃗)` as a flat vector.
    pub fn to_joint(&self, pi: &InputDistribution) -> Result<Vec<f64>> {
        if pi.scenario != self.scenario {
            return Err(Error::ScenarioMismatch);
        }
        let ot = self.scenario.output_tuples();
        let mut joint = self.values.clone();
        for (xi, block) in joint.chunks_mut(ot).enumerate() {
            let w = pi.weights[xi];
            for v in block {
                *v *= w;
            }
        }
        Ok(joint)
    }
}

/// Report-style validity check; see [`Behavior::validate`].
pub fn validate_behavior(q: &Behavior) -> ValidationReport {
    q.validate(FEAS_TOL)
}

/// True iff every party's marginal is independent of its own input within
/// `tol`.
pub fn is_nonsignaling(q: &Behavior, tol: f64) -> bool {
    q.ns_violation() <= tol
}

/// `v·q + (1−v)·u` with `u` the maximally mixed behavior.
pub fn mix_with_uniform(q: &Behavior, v: f64) -> Result<Behavior> {
    if !(0.0..=1.0).contains(&v) {
        return Err(Error::Domain(alloc::format!(
            "mixing weight {v} outside [0, 1]"
        )));
    }
    let u = 1.0 / q.scenario.output_tuples() as f64;
    let values = q.values.iter().map(|&p| v * p + (1.0 - v) * u).collect();
    Behavior::from_values(q.scenario.clone(), values)
}

/// The PR box: `p(a,b|x,y) = ½` iff `a ⊕ b = x·y`, on the CHSH scenario.
pub fn make_pr_box() -> Behavior {
    pr_box_variant(0, 0, 0)
}

/// The eight extremal non-local vertices of the CHSH-scenario non-signaling
/// polytope: `p(a,b|x,y) = ½` iff `a ⊕ b = x·y ⊕ αx ⊕ βy ⊕ γ`.
pub fn pr_box_variant(alpha: u8, beta: u8, gamma: u8) -> Behavior {
    Behavior::from_fn(Scenario::chsh(), |x, a| {
        let parity =
            (x[0] * x[1] + alpha as usize * x[0] + beta as usize * x[1] + gamma as usize) % 2;
        if (a[0] + a[1]) % 2 == parity {
            0.5
        } else {
            0.0
        }
    })
}

/// The matrix whose columns are all local deterministic behaviors.
#[derive(Debug, Clone)]
pub struct StrategyMatrix {
    scenario: Scenario,
    columns: usize,
    /// Row-major, `dimension() x columns` with entries in {0, 1}.
    data: Vec<f64>,
}

impl StrategyMatrix {
    pub fn scenario(&self) -> &Scenario {
        &self.scenario
    }

    pub fn rows(&self) -> usize {
        self.scenario.dimension()
    }

    pub fn columns(&self) -> usize {
        self.columns
    }

    #[inline]
    pub fn entry(&self, row: usize, col: usize) -> f64 {
        self.data[row * self.columns + col]
    }

    #[inline]
    pub fn row(&self, row: usize) -> &[f64] {
        &self.data[row * self.columns..(row + 1) * self.columns]
    }

    /// Column `i` as an owned behavior.
    pub fn column_behavior(&self, col: usize) -> Behavior {
        let n = self.rows();
        let mut values = Vec::with_capacity(n);
        for r in 0..n {
            values.push(self.entry(r, col));
        }
        Behavior {
            scenario: self.scenario.clone(),
            values,
        }
    }

    /// `A·λ` as a behavior-sized vector.
    pub fn mix(&self, lambda: &[f64]) -> Result<Vec<f64>> {
        if lambda.len() != self.columns {
            return Err(Error::DimensionMismatch {
                expected: self.columns,
                got: lambda.len(),
            });
        }
        let n = self.rows();
        let mut out = vec![0.0; n];
        for (r, o) in out.iter_mut().enumerate() {
            let row = self.row(r);
            let mut acc = 0.0;
            for (a, l) in row.iter().zip(lambda) {
                acc += a * l;
            }
            *o = acc;
        }
        Ok(out)
    }

    /// The same strategies in a caller-chosen column order.
    pub fn with_permuted_columns(&self, perm: &[usize]) -> Result<StrategyMatrix> {
        if perm.len() != self.columns {
            return Err(Error::DimensionMismatch {
                expected: self.columns,
                got: perm.len(),
            });
        }
        let mut seen = vec![false; self.columns];
        for &p in perm {
            if p >= self.columns || seen[p] {
                return Err(Error::InvalidPermutation);
            }
            seen[p] = true;
        }
        let n = self.rows();
        let mut data = vec![0.0; n * self.columns];
        for r in 0..n {
            let src = self.row(r);
            let dst = &mut data[r * self.columns..(r + 1) * self.columns];
            for (new_col, &old_col) in perm.iter().enumerate() {
                dst[new_col] = src[old_col];
            }
        }
        Ok(StrategyMatrix {
            scenario: self.scenario.clone(),
            columns: self.columns,
            data,
        })
    }

    /// `fᵀA` for a coefficient vector over behavior entries.
    pub fn functional_on_columns(&self, coeffs: &[f64]) -> Result<Vec<f64>> {
        if coeffs.len() != self.rows() {
            return Err(Error::DimensionMismatch {
                expected: self.rows(),
                got: coeffs.len(),
            });
        }
        let mut out = vec![0.0; self.columns];
        for (r, &c) in coeffs.iter().enumerate() {
            if c == 0.0 {
                continue;
            }
            for (o, a) in out.iter_mut().zip(self.row(r)) {
                *o += c * a;
            }
        }
        Ok(out)
    }
}

/// Enumerate every tuple of per-party deterministic response functions, in
/// lexicographic order of the function encodings (party 1 most significant;
/// within a party, the response to input 0 is the most significant digit).
pub fn enumerate_strategies(scenario: &Scenario) -> Result<StrategyMatrix> {
    let m = scenario.strategy_count()?;
    let n = scenario.dimension();
    let parties = scenario.parties();

    // Per-party strategy counts d_k^{m_k}.
    let per_party: Vec<usize> = scenario
        .inputs
        .iter()
        .zip(&scenario.outputs)
        .map(|(&mk, &dk)| dk.pow(mk as u32))
        .collect();

    let mut data = vec![0.0; n * m];
    let mut x = vec![0usize; parties];
    let mut a = vec![0usize; parties];
    for col in 0..m {
        // Decode the column into per-party response tables.
        let mut rem = col;
        let mut responses: Vec<Vec<usize>> = Vec::with_capacity(parties);
        for k in (0..parties).rev() {
            let enc = rem % per_party[k];
            rem /= per_party[k];
            let mk = scenario.inputs[k];
            let dk = scenario.outputs[k];
            let mut table = vec![0usize; mk];
            let mut e = enc;
            for xi in (0..mk).rev() {
                table[xi] = e % dk;
                e /= dk;
            }
            responses.push(table);
        }
        responses.reverse();

        // One unit entry per input tuple.
        x.iter_mut().for_each(|v| *v = 0);
        loop {
            for k in 0..parties {
                a[k] = responses[k][x[k]];
            }
            let row = scenario.flat_index(&x, &a)?;
            data[row * m + col] = 1.0;

            let mut k = parties;
            loop {
                if k == 0 {
                    break;
                }
                k -= 1;
                x[k] += 1;
                if x[k] < scenario.inputs[k] {
                    break;
                }
                x[k] = 0;
            }
            if x.iter().all(|&v| v == 0) {
                break;
            }
        }
    }

    Ok(StrategyMatrix {
        scenario: scenario.clone(),
        columns: m,
        data,
    })
}

/// Outcome of a locality test.
#[derive(Debug, Clone)]
pub struct LocalityResult {
    pub local: bool,
    /// A feasible convex decomposition over strategy columns when local.
    pub weights: Option<Vec<f64>>,
}

/// Test membership in the local polytope: is there `λ ≥ 0`, `Σλ = 1` with
/// `A·λ = q` within the crate feasibility tolerance?
pub fn is_local(q: &Behavior, a: &StrategyMatrix) -> Result<LocalityResult> {
    if *q.scenario() != a.scenario {
        return Err(Error::ScenarioMismatch);
    }
    crate::lp::local_feasibility(q, a)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn flat_index_convention() {
        let s = Scenario::chsh();
        assert_eq!(s.flat_index(&[0, 0], &[0, 0]).unwrap(), 0);
        assert_eq!(s.flat_index(&[1, 1], &[1, 1]).unwrap(), 15);
        // ((x·2 + y)·2 + a)·2 + b
        assert_eq!(s.flat_index(&[0, 1], &[1, 0]).unwrap(), 6);
    }

    #[test]
    fn flat_index_rejects_out_of_range() {
        let s = Scenario::chsh();
        assert!(matches!(
            s.flat_index(&[2, 0], &[0, 0]),
            Err(Error::IndexOutOfRange { party: 0, .. })
        ));
        assert!(matches!(
            s.flat_index(&[0, 0], &[0, 2]),
            Err(Error::IndexOutOfRange { party: 1, .. })
        ));
    }

    #[test]
    fn split_index_inverts_flat_index() {
        let s = Scenario::new(vec![2, 3], vec![3, 2]).unwrap();
        for idx in 0..s.dimension() {
            let (x, a) = s.split_index(idx);
            assert_eq!(s.flat_index(&x, &a).unwrap(), idx);
        }
    }

    #[test]
    fn scenario_cap_enforced() {
        let err = Scenario::new(vec![100, 100, 100], vec![100, 100, 100]).unwrap_err();
        assert!(matches!(err, Error::ScenarioTooLarge { .. }));
    }

    #[test]
    fn strategy_counts() {
        let chsh = enumerate_strategies(&Scenario::chsh()).unwrap();
        assert_eq!(chsh.columns(), 16);
        assert_eq!(chsh.rows(), 16);

        let single = enumerate_strategies(&Scenario::new(vec![1], vec![5]).unwrap()).unwrap();
        assert_eq!(single.columns(), 5);

        let tri = enumerate_strategies(&Scenario::symmetric(3, 2, 2).unwrap()).unwrap();
        assert_eq!(tri.columns(), 64);
        assert_eq!(tri.rows(), 64);
    }

    #[test]
    fn strategy_columns_are_valid_deterministic_behaviors() {
        let a = enumerate_strategies(&Scenario::new(vec![2, 3], vec![2, 2]).unwrap()).unwrap();
        for col in 0..a.columns() {
            let b = a.column_behavior(col);
            let rep = validate_behavior(&b);
            assert!(rep.valid, "column {col}: {rep:?}");
            // Deterministic: exactly one unit entry per input block.
            for block in b.values().chunks(b.scenario().output_tuples()) {
                assert_eq!(block.iter().filter(|&&v| v == 1.0).count(), 1);
            }
        }
    }

    #[test]
    fn validate_flags_the_zero_vector() {
        let s = Scenario::chsh();
        let z = Behavior::from_values(s, vec![0.0; 16]).unwrap();
        let rep = validate_behavior(&z);
        assert!(!rep.valid);
        assert!((rep.max_violation - 1.0).abs() < 1e-15);
    }

    #[test]
    fn uniform_behavior_is_valid_and_nonsignaling() {
        let u = Behavior::uniform(Scenario::chsh());
        assert!(validate_behavior(&u).valid);
        assert!(is_nonsignaling(&u, 1e-12));
    }

    #[test]
    fn pr_box_is_valid_and_nonsignaling() {
        let pr = make_pr_box();
        assert!(validate_behavior(&pr).valid);
        assert!(is_nonsignaling(&pr, 0.0));
    }

    #[test]
    fn signaling_behavior_detected() {
        // Alice's outcome distribution depends on Bob's input.
        let s = Scenario::chsh();
        let q = Behavior::from_fn(s, |x, a| {
            let p_a = if x[1] == 0 {
                if a[0] == 0 {
                    0.9
                } else {
                    0.1
                }
            } else if a[0] == 0 {
                0.1
            } else {
                0.9
            };
            p_a * 0.5
        });
        assert!(validate_behavior(&q).valid);
        assert!(!is_nonsignaling(&q, 1e-6));
        assert!((q.ns_violation() - 0.8).abs() < 1e-12);
    }

    #[test]
    fn mixing_preserves_validity_and_ns() {
        let pr = make_pr_box();
        for &v in &[0.0, 0.25, 0.5, 0.75, 1.0] {
            let q = mix_with_uniform(&pr, v).unwrap();
            assert!(validate_behavior(&q).valid);
            assert!(is_nonsignaling(&q, 1e-12));
        }
        let q = mix_with_uniform(&pr, 1.0).unwrap();
        assert_eq!(q.values(), pr.values());
        let u = mix_with_uniform(&pr, 0.0).unwrap();
        assert_eq!(u.values(), Behavior::uniform(Scenario::chsh()).values());
        assert!(mix_with_uniform(&pr, 1.5).is_err());
        assert!(mix_with_uniform(&pr, -0.1).is_err());
    }
}
