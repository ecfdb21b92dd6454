//! Free operations of the non-locality resource theory.
//!
//! Each operation maps local behaviors to local behaviors, and the
//! trace-distance measure never increases under any of them: relabelings
//! leave it invariant, convex mixing obeys the convexity bound, and local
//! post-processing, restricted pre-processing and uncorrelated input
//! enlarging are contractive. The property-test suites drive random
//! instances of these operations through the LP measure to check exactly
//! that.
//!
//! Channels are represented as shared-randomness mixtures of per-party
//! deterministic maps. Locality preservation is then true by construction,
//! and arbitrary local stochastic channels are reachable as mixtures.

use alloc::vec;
use alloc::vec::Vec;

use crate::scenario::{Behavior, Scenario};
use crate::{Error, Result};

const WEIGHT_TOL: f64 = 1e-12;

/// A relabeling: a permutation of parties, of each party's inputs, and of
/// the outputs of every (party, input) pair.
///
/// Applied to a behavior it produces `R(q)(a⃗|x⃗) = q(a⃗'|x⃗')` where party
/// `j`'s data is read from party `party[j]` at input `inputs[j][x_j]` and
/// output `outputs[j][x_j][a_j]`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Relabeling {
    /// `party[j]` is the source party for slot `j`.
    pub party: Vec<usize>,
    /// `inputs[j][x]` is the source input for slot `j` at input `x`.
    pub inputs: Vec<Vec<usize>>,
    /// `outputs[j][x][a]` is the source output for slot `j` at input `x`.
    pub outputs: Vec<Vec<Vec<usize>>>,
}

fn is_permutation(p: &[usize], n: usize) -> bool {
    if p.len() != n {
        return false;
    }
    let mut seen = vec![false; n];
    for &v in p {
        if v >= n || seen[v] {
            return false;
        }
        seen[v] = true;
    }
    true
}

impl Relabeling {
    pub fn identity(scenario: &Scenario) -> Self {
        let parties = scenario.parties();
        Relabeling {
            party: (0..parties).collect(),
            inputs: scenario
                .inputs()
                .iter()
                .map(|&m| (0..m).collect())
                .collect(),
            outputs: scenario
                .inputs()
                .iter()
                .zip(scenario.outputs())
                .map(|(&m, &d)| vec![(0..d).collect(); m])
                .collect(),
        }
    }

    pub fn validate(&self, scenario: &Scenario) -> Result<()> {
        let parties = scenario.parties();
        if !is_permutation(&self.party, parties)
            || self.inputs.len() != parties
            || self.outputs.len() != parties
        {
            return Err(Error::InvalidPermutation);
        }
        for j in 0..parties {
            let src = self.party[j];
            let m = scenario.inputs()[j];
            let d = scenario.outputs()[j];
            // The source party must have the same arity as the slot.
            if scenario.inputs()[src] != m || scenario.outputs()[src] != d {
                return Err(Error::InvalidPermutation);
            }
            if !is_permutation(&self.inputs[j], m) || self.outputs[j].len() != m {
                return Err(Error::InvalidPermutation);
            }
            for perm in &self.outputs[j] {
                if !is_permutation(perm, d) {
                    return Err(Error::InvalidPermutation);
                }
            }
        }
        Ok(())
    }

    /// Gather table: entry `new` of the image is entry `table[new]` of the
    /// original vector.
    pub fn entry_table(&self, scenario: &Scenario) -> Result<Vec<usize>> {
        self.validate(scenario)?;
        let parties = scenario.parties();
        let n = scenario.dimension();
        let mut table = Vec::with_capacity(n);
        let mut x_old = vec![0usize; parties];
        let mut a_old = vec![0usize; parties];
        for x in scenario.input_tuples_iter() {
            for a in scenario.output_tuples_iter() {
                for j in 0..parties {
                    let src = self.party[j];
                    x_old[src] = self.inputs[j][x[j]];
                    a_old[src] = self.outputs[j][x[j]][a[j]];
                }
                table.push(scenario.flat_index(&x_old, &a_old)?);
            }
        }
        Ok(table)
    }

    /// Apply to a flat entry vector (behavior values or functional
    /// coefficients transform with the same gather).
    pub fn apply_to_entries(&self, scenario: &Scenario, entries: &[f64]) -> Result<Vec<f64>> {
        if entries.len() != scenario.dimension() {
            return Err(Error::DimensionMismatch {
                expected: scenario.dimension(),
                got: entries.len(),
            });
        }
        let table = self.entry_table(scenario)?;
        Ok(table.into_iter().map(|i| entries[i]).collect())
    }
}

/// Permute the entries of a behavior.
pub fn relabel(q: &Behavior, r: &Relabeling) -> Result<Behavior> {
    let values = r.apply_to_entries(q.scenario(), q.values())?;
    Behavior::from_values(q.scenario().clone(), values)
}

/// Weighted mixture of behaviors on a common scenario.
pub fn convex_mix(items: &[(f64, &Behavior)]) -> Result<Behavior> {
    let Some(((_, first), rest)) = items.split_first() else {
        return Err(Error::Domain("empty mixture".into()));
    };
    let scen = first.scenario();
    let total: f64 = items.iter().map(|(w, _)| w).sum();
    if items.iter().any(|(w, _)| *w < 0.0) || (total - 1.0).abs() > WEIGHT_TOL {
        return Err(Error::Domain(alloc::format!(
            "mixture weights sum to {total}, expected 1"
        )));
    }
    for (_, q) in rest {
        if q.scenario() != scen {
            return Err(Error::ScenarioMismatch);
        }
    }
    let mut values = vec![0.0; scen.dimension()];
    for (w, q) in items {
        for (acc, v) in values.iter_mut().zip(q.values()) {
            *acc += w * v;
        }
    }
    Behavior::from_values(scen.clone(), values)
}

/// One deterministic output map of a single party: for each input, a table
/// sending old outcomes to new outcomes.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct OutputMap {
    pub new_outputs: usize,
    /// `map[x][a]` is the new outcome.
    pub map: Vec<Vec<usize>>,
}

/// A local output channel: a shared-randomness mixture of tuples of
/// per-party deterministic output maps.
#[derive(Debug, Clone, PartialEq)]
pub struct LocalChannel {
    pub components: Vec<(f64, Vec<OutputMap>)>,
}

impl LocalChannel {
    /// The channel that leaves every outcome unchanged.
    pub fn identity(scenario: &Scenario) -> Self {
        let maps = scenario
            .inputs()
            .iter()
            .zip(scenario.outputs())
            .map(|(&m, &d)| OutputMap {
                new_outputs: d,
                map: vec![(0..d).collect(); m],
            })
            .collect();
        LocalChannel {
            components: vec![(1.0, maps)],
        }
    }

    fn validate(&self, scenario: &Scenario) -> Result<Vec<usize>> {
        let parties = scenario.parties();
        let Some((_, first)) = self.components.first() else {
            return Err(Error::ChannelArity);
        };
        if first.len() != parties {
            return Err(Error::ChannelArity);
        }
        let new_outputs: Vec<usize> = first.iter().map(|om| om.new_outputs).collect();
        let total: f64 = self.components.iter().map(|(w, _)| w).sum();
        if self.components.iter().any(|(w, _)| *w < 0.0) || (total - 1.0).abs() > WEIGHT_TOL {
            return Err(Error::Domain(
                "channel weights must form a distribution".into(),
            ));
        }
        for (_, maps) in &self.components {
            if maps.len() != parties {
                return Err(Error::ChannelArity);
            }
            for (k, om) in maps.iter().enumerate() {
                if om.new_outputs != new_outputs[k]
                    || om.new_outputs == 0
                    || om.map.len() != scenario.inputs()[k]
                {
                    return Err(Error::ChannelArity);
                }
                for row in &om.map {
                    if row.len() != scenario.outputs()[k]
                        || row.iter().any(|&v| v >= om.new_outputs)
                    {
                        return Err(Error::ChannelArity);
                    }
                }
            }
        }
        Ok(new_outputs)
    }
}

/// Apply a local output channel:
/// `O(q)(α⃗|x⃗) = Σ_a⃗ O(α⃗|a⃗,x⃗)·q(a⃗|x⃗)`.
pub fn post_process(q: &Behavior, ch: &LocalChannel) -> Result<Behavior> {
    let scen = q.scenario();
    let new_outputs = ch.validate(scen)?;
    let new_scen = Scenario::new(scen.inputs().to_vec(), new_outputs)?;
    let mut values = vec![0.0; new_scen.dimension()];
    let mut alpha = vec![0usize; scen.parties()];
    for (w, maps) in &ch.components {
        if *w == 0.0 {
            continue;
        }
        let mut idx = 0usize;
        for x in scen.input_tuples_iter() {
            for a in scen.output_tuples_iter() {
                let v = q.values()[idx];
                idx += 1;
                if v == 0.0 {
                    continue;
                }
                for k in 0..scen.parties() {
                    alpha[k] = maps[k].map[x[k]][a[k]];
                }
                values[new_scen.flat_index(&x, &alpha)?] += w * v;
            }
        }
    }
    Behavior::from_values(new_scen, values)
}

/// A restricted input channel: a shared-randomness mixture of per-party
/// deterministic input maps on input sets of unchanged size.
#[derive(Debug, Clone, PartialEq)]
pub struct InputChannel {
    /// `(weight, maps)` with `maps[k][new_input]` the input actually used.
    pub components: Vec<(f64, Vec<Vec<usize>>)>,
}

impl InputChannel {
    pub fn identity(scenario: &Scenario) -> Self {
        InputChannel {
            components: vec![(
                1.0,
                scenario
                    .inputs()
                    .iter()
                    .map(|&m| (0..m).collect())
                    .collect(),
            )],
        }
    }

    fn validate(&self, scenario: &Scenario) -> Result<()> {
        let parties = scenario.parties();
        if self.components.is_empty() {
            return Err(Error::ChannelArity);
        }
        let total: f64 = self.components.iter().map(|(w, _)| w).sum();
        if self.components.iter().any(|(w, _)| *w < 0.0) || (total - 1.0).abs() > WEIGHT_TOL {
            return Err(Error::Domain(
                "channel weights must form a distribution".into(),
            ));
        }
        for (_, maps) in &self.components {
            if maps.len() != parties {
                return Err(Error::ChannelArity);
            }
            for (k, map) in maps.iter().enumerate() {
                let m = scenario.inputs()[k];
                if map.len() != m || map.iter().any(|&v| v >= m) {
                    return Err(Error::ChannelArity);
                }
            }
        }
        // Column-sum restriction: Σ_χ⃗ I(x⃗|χ⃗) ≤ 1 for every x⃗. For a
        // mixture of deterministic maps the sum factorizes over preimage
        // counts.
        let mut worst = 0.0f64;
        for x in scenario.input_tuples_iter() {
            let mut col = 0.0;
            for (w, maps) in &self.components {
                let mut prod = *w;
                for (k, &xk) in x.iter().enumerate() {
                    prod *= maps[k].iter().filter(|&&v| v == xk).count() as f64;
                }
                col += prod;
            }
            worst = worst.max(col);
        }
        if worst > 1.0 + 1e-9 {
            return Err(Error::ChannelRestriction { max: worst });
        }
        Ok(())
    }
}

/// Apply a restricted input channel:
/// `I(q)(a⃗|χ⃗) = Σ_x⃗ q(a⃗|x⃗)·I(x⃗|χ⃗)`.
pub fn pre_process(q: &Behavior, ch: &InputChannel) -> Result<Behavior> {
    let scen = q.scenario();
    ch.validate(scen)?;
    let mut values = vec![0.0; scen.dimension()];
    let ot = scen.output_tuples();
    let mut x_old = vec![0usize; scen.parties()];
    for (w, maps) in &ch.components {
        if *w == 0.0 {
            continue;
        }
        for (xi, chi) in scen.input_tuples_iter().enumerate() {
            for k in 0..scen.parties() {
                x_old[k] = maps[k][chi[k]];
            }
            let src = scen.input_tuple_index(&x_old)? * ot;
            let dst = xi * ot;
            for ai in 0..ot {
                values[dst + ai] += w * q.values()[src + ai];
            }
        }
    }
    Behavior::from_values(scen.clone(), values)
}

/// Add one uncorrelated deterministic measurement to `party`: the enlarged
/// behavior answers the new input with `fixed_output` while the other
/// parties' statistics follow their marginal (taken at the party's input 0,
/// which is input-independent for non-signaling behaviors).
pub fn input_enlarge(q: &Behavior, party: usize, fixed_output: usize) -> Result<Behavior> {
    let scen = q.scenario();
    if party >= scen.parties() {
        return Err(Error::IndexOutOfRange {
            party,
            value: party,
            limit: scen.parties(),
        });
    }
    if fixed_output >= scen.outputs()[party] {
        return Err(Error::IndexOutOfRange {
            party,
            value: fixed_output,
            limit: scen.outputs()[party],
        });
    }
    let old_m = scen.inputs()[party];
    let mut new_inputs = scen.inputs().to_vec();
    new_inputs[party] += 1;
    let new_scen = Scenario::new(new_inputs, scen.outputs().to_vec())?;

    let mut x_old = vec![0usize; scen.parties()];
    let mut a_old = vec![0usize; scen.parties()];
    let mut out = vec![0.0; new_scen.dimension()];
    let mut idx = 0usize;
    for x in new_scen.input_tuples_iter() {
        for a in new_scen.output_tuples_iter() {
            let v = if x[party] < old_m {
                q.prob(&x, &a).expect("index stays valid")
            } else if a[party] != fixed_output {
                0.0
            } else {
                // Marginal of the other parties at reference input 0.
                x_old.copy_from_slice(&x);
                x_old[party] = 0;
                a_old.copy_from_slice(&a);
                let mut marg = 0.0;
                for ak in 0..scen.outputs()[party] {
                    a_old[party] = ak;
                    marg += q.prob(&x_old, &a_old).expect("index stays valid");
                }
                marg
            };
            out[idx] = v;
            idx += 1;
        }
    }
    Behavior::from_values(new_scen, out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scenario::{is_nonsignaling, make_pr_box, validate_behavior};

    #[test]
    fn identity_relabeling_is_identity() {
        let pr = make_pr_box();
        let id = Relabeling::identity(pr.scenario());
        let image = relabel(&pr, &id).unwrap();
        assert_eq!(image.values(), pr.values());
    }

    #[test]
    fn transposition_applied_twice_is_identity() {
        let pr = make_pr_box();
        let scen = pr.scenario().clone();
        // Swap Alice's inputs.
        let mut r = Relabeling::identity(&scen);
        r.inputs[0] = vec![1, 0];
        let once = relabel(&pr, &r).unwrap();
        assert_ne!(once.values(), pr.values());
        let twice = relabel(&once, &r).unwrap();
        assert_eq!(twice.values(), pr.values());

        // Swap the parties.
        let mut p = Relabeling::identity(&scen);
        p.party = vec![1, 0];
        let twice = relabel(&relabel(&pr, &p).unwrap(), &p).unwrap();
        assert_eq!(twice.values(), pr.values());

        // Flip one party's outputs on one input.
        let mut o = Relabeling::identity(&scen);
        o.outputs[1][0] = vec![1, 0];
        let twice = relabel(&relabel(&pr, &o).unwrap(), &o).unwrap();
        assert_eq!(twice.values(), pr.values());
    }

    #[test]
    fn invalid_permutations_are_rejected() {
        let pr = make_pr_box();
        let mut r = Relabeling::identity(pr.scenario());
        r.inputs[0] = vec![0, 0];
        assert!(relabel(&pr, &r).is_err());
        let mut r = Relabeling::identity(pr.scenario());
        r.party = vec![0, 0];
        assert!(relabel(&pr, &r).is_err());
    }

    #[test]
    fn convex_mix_weights_must_be_a_distribution() {
        let pr = make_pr_box();
        assert!(convex_mix(&[(0.6, &pr), (0.3, &pr)]).is_err());
        let q = convex_mix(&[(1.0, &pr)]).unwrap();
        assert_eq!(q.values(), pr.values());
    }

    #[test]
    fn identity_channel_is_identity() {
        let pr = make_pr_box();
        let ch = LocalChannel::identity(pr.scenario());
        let image = post_process(&pr, &ch).unwrap();
        assert_eq!(image.values(), pr.values());
    }

    #[test]
    fn coarse_graining_to_one_outcome_is_deterministic() {
        let pr = make_pr_box();
        let maps: alloc::vec::Vec<OutputMap> = (0..2)
            .map(|_| OutputMap {
                new_outputs: 1,
                map: vec![vec![0, 0], vec![0, 0]],
            })
            .collect();
        let ch = LocalChannel {
            components: vec![(1.0, maps)],
        };
        let image = post_process(&pr, &ch).unwrap();
        assert!(validate_behavior(&image).valid);
        assert!(image.values().iter().all(|&v| (v - 1.0).abs() < 1e-12));
    }

    #[test]
    fn input_permutation_channel_matches_relabel() {
        let pr = make_pr_box();
        let scen = pr.scenario().clone();
        let ch = InputChannel {
            components: vec![(1.0, vec![vec![1, 0], vec![0, 1]])],
        };
        let via_channel = pre_process(&pr, &ch).unwrap();
        let mut r = Relabeling::identity(&scen);
        r.inputs[0] = vec![1, 0];
        let via_relabel = relabel(&pr, &r).unwrap();
        assert_eq!(via_channel.values(), via_relabel.values());
    }

    #[test]
    fn constant_input_map_violates_restriction() {
        let pr = make_pr_box();
        let ch = InputChannel {
            components: vec![(1.0, vec![vec![0, 0], vec![0, 1]])],
        };
        assert!(matches!(
            pre_process(&pr, &ch),
            Err(Error::ChannelRestriction { .. })
        ));
    }

    #[test]
    fn identity_input_channel_is_identity() {
        let pr = make_pr_box();
        let ch = InputChannel::identity(pr.scenario());
        let image = pre_process(&pr, &ch).unwrap();
        assert_eq!(image.values(), pr.values());
    }

    #[test]
    fn enlarging_keeps_validity_and_ns() {
        let pr = make_pr_box();
        let big = input_enlarge(&pr, 0, 1).unwrap();
        assert_eq!(big.scenario().inputs(), &[3, 2]);
        assert!(validate_behavior(&big).valid);
        assert!(is_nonsignaling(&big, 1e-12));
        // Old entries unchanged.
        for x in pr.scenario().input_tuples_iter() {
            for a in pr.scenario().output_tuples_iter() {
                assert_eq!(big.prob(&x, &a).unwrap(), pr.prob(&x, &a).unwrap());
            }
        }
        // New input always answers the fixed output.
        assert_eq!(big.prob(&[2, 0], &[0, 0]).unwrap(), 0.0);
        assert!((big.prob(&[2, 0], &[1, 0]).unwrap() - 0.5).abs() < 1e-12);
    }

    #[test]
    fn double_enlargement_commutes_across_parties() {
        let pr = make_pr_box();
        let ab = input_enlarge(&input_enlarge(&pr, 0, 0).unwrap(), 1, 1).unwrap();
        let ba = input_enlarge(&input_enlarge(&pr, 1, 1).unwrap(), 0, 0).unwrap();
        assert_eq!(ab.scenario(), ba.scenario());
        for (x, y) in ab.values().iter().zip(ba.values()) {
            assert!((x - y).abs() < 1e-12);
        }
    }
}
