use std::collections::BTreeMap;

use crate::error::{Error, Result};
use crate::operators::Operator;

use super::bohr::BohrComponent;

/// Relative tolerance for matching component frequencies to set members.
const MATCH_RTOL: f64 = 1e-8;
/// Relative tolerance for treating two frequencies as the same transition.
const DEDUP_RTOL: f64 = 1e-9;

/// A positive transition frequency, optionally restricted to one bath or one
/// particle-number sector.
#[derive(Debug, Clone, PartialEq)]
pub struct Transition {
    pub frequency: f64,
    pub sector: Option<i64>,
    pub bath: Option<String>,
}

impl Transition {
    pub fn new(frequency: f64) -> Self {
        Self { frequency, sector: None, bath: None }
    }

    fn matches(&self, frequency: f64, sector: Option<i64>, bath: &str) -> bool {
        let scale = self.frequency.abs().max(frequency.abs()).max(1e-12);
        (self.frequency - frequency).abs() <= MATCH_RTOL * scale
            && self.sector.is_none_or(|s| Some(s) == sector)
            && self.bath.as_deref().is_none_or(|b| b == bath)
    }
}

/// A set `x_q` of transitions sharing the set frequency `ω_q`.
#[derive(Debug, Clone, PartialEq)]
pub struct FrequencySet {
    pub members: Vec<Transition>,
    pub frequency: f64,
}

impl FrequencySet {
    pub fn spread(&self) -> f64 {
        let (lo, hi) = self
            .members
            .iter()
            .fold((f64::INFINITY, f64::NEG_INFINITY), |(a, b), m| (a.min(m.frequency), b.max(m.frequency)));
        if lo.is_finite() {
            hi - lo
        } else {
            0.0
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum SetFrequencyPolicy {
    /// Arithmetic mean of the distinct member frequencies.
    Mean,
    /// One value per set, in ascending order of the sets.
    Explicit(Vec<f64>),
}

/// Partition of the positive transition frequencies into sets.
#[derive(Debug, Clone, PartialEq)]
pub struct FrequencyGrouping {
    pub sets: Vec<FrequencySet>,
    pub eps_cluster: f64,
    pub gap_min: f64,
}

/// Set frequency assigned to a component (mirrored for negative frequencies).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SetAssignment {
    pub set: Option<usize>,
    pub frequency: f64,
}

fn dedup_sorted(mut freqs: Vec<f64>) -> Vec<f64> {
    freqs.sort_by(f64::total_cmp);
    let mut out: Vec<f64> = Vec::with_capacity(freqs.len());
    for w in freqs {
        match out.last() {
            Some(&last) if (w - last).abs() <= DEDUP_RTOL * w.abs().max(last.abs()) => {}
            _ => out.push(w),
        }
    }
    out
}

fn mean(values: &[f64]) -> f64 {
    values.iter().sum::<f64>() / values.len() as f64
}

impl FrequencyGrouping {
    /// One set per distinct positive frequency (secular limit).
    pub fn singletons(components: &[BohrComponent]) -> Self {
        let freqs = dedup_sorted(positive(components).map(|c| c.frequency).collect());
        let sets =
            freqs.into_iter().map(|w| FrequencySet { members: vec![Transition::new(w)], frequency: w }).collect();
        Self { sets, eps_cluster: 0.0, gap_min: 0.0 }
    }

    /// One set per bath holding all of that bath's positive frequencies, at
    /// their mean (local limit).
    pub fn per_bath(components: &[BohrComponent]) -> Self {
        let mut by_bath: BTreeMap<&str, Vec<f64>> = BTreeMap::new();
        for c in positive(components) {
            by_bath.entry(&c.bath_id).or_default().push(c.frequency);
        }
        let sets = by_bath
            .into_iter()
            .map(|(bath, f)| {
                let f = dedup_sorted(f);
                FrequencySet {
                    frequency: mean(&f),
                    members: f
                        .iter()
                        .map(|&w| Transition { frequency: w, sector: None, bath: Some(bath.to_string()) })
                        .collect(),
                }
            })
            .collect::<Vec<_>>();
        let eps = sets.iter().map(FrequencySet::spread).fold(0.0, f64::max);
        Self { sets, eps_cluster: eps, gap_min: 0.0 }
    }

    /// One set per (bath, source particle number) at the mean of its
    /// frequencies; sets of one bath with equal set frequency are merged.
    /// Needs sector-resolved components.
    pub fn per_bath_and_sector(components: &[BohrComponent]) -> Result<Self> {
        let mut groups: BTreeMap<(&str, i64), Vec<f64>> = BTreeMap::new();
        for c in positive(components) {
            let s = c.sector.ok_or_else(|| {
                Error::GroupingInfeasible("semi-local grouping needs sector-resolved components".into())
            })?;
            groups.entry((&c.bath_id, s)).or_default().push(c.frequency);
        }
        let mut merged: Vec<(String, FrequencySet)> = Vec::new();
        for ((bath, sector), f) in groups {
            let f = dedup_sorted(f);
            let w = mean(&f);
            let members: Vec<Transition> = f
                .iter()
                .map(|&x| Transition { frequency: x, sector: Some(sector), bath: Some(bath.to_string()) })
                .collect();
            let existing = merged
                .iter_mut()
                .find(|(b, s)| b == bath && (s.frequency - w).abs() <= DEDUP_RTOL * w.abs().max(1e-12));
            match existing {
                Some((_, s)) => s.members.extend(members),
                None => merged.push((bath.to_string(), FrequencySet { members, frequency: w })),
            }
        }
        let sets: Vec<FrequencySet> = merged.into_iter().map(|(_, s)| s).collect();
        let eps = sets.iter().map(FrequencySet::spread).fold(0.0, f64::max);
        Ok(Self { sets, eps_cluster: eps, gap_min: 0.0 })
    }

    /// Every set whose members match the component.
    fn matching_sets(&self, frequency: f64, sector: Option<i64>, bath: &str) -> Vec<usize> {
        self.sets
            .iter()
            .enumerate()
            .filter(|(_, s)| s.members.iter().any(|m| m.matches(frequency, sector, bath)))
            .map(|(i, _)| i)
            .collect()
    }

    /// Set containing a component; negative frequencies use the mirrored set and
    /// zero frequencies map to zero.
    pub fn assign(&self, component: &BohrComponent) -> Result<SetAssignment> {
        let w = component.frequency;
        if w == 0.0 {
            return Ok(SetAssignment { set: None, frequency: 0.0 });
        }
        // the mirrored transition starts where this one ends
        let sector = if w > 0.0 { component.sector } else { component.sector.map(|s| s - component.charge as i64) };
        let hits = self.matching_sets(w.abs(), sector, &component.bath_id);
        match hits.as_slice() {
            [] => Err(Error::UncoveredFrequency { frequency: w }),
            [q] => {
                let f = self.sets[*q].frequency;
                Ok(SetAssignment { set: Some(*q), frequency: if w > 0.0 { f } else { -f } })
            }
            _ => Err(Error::GroupingInfeasible(format!("frequency {w} belongs to several sets"))),
        }
    }
}

fn positive(components: &[BohrComponent]) -> impl Iterator<Item = &BohrComponent> {
    components.iter().filter(|c| c.frequency > 0.0)
}

/// Single-linkage clustering of positive transition frequencies.
pub fn group_frequencies(
    freqs: &[f64],
    eps_cluster: f64,
    gap_min: f64,
    policy: &SetFrequencyPolicy,
) -> Result<FrequencyGrouping> {
    if freqs.is_empty() {
        return Err(Error::GroupingInfeasible("no frequencies to group".into()));
    }
    if freqs.iter().any(|&w| !(w > 0.0 && w.is_finite())) {
        return Err(Error::GroupingInfeasible("frequencies must be positive".into()));
    }
    let f = dedup_sorted(freqs.to_vec());
    let mut clusters: Vec<Vec<f64>> = vec![vec![f[0]]];
    for w in f.windows(2) {
        if w[1] - w[0] <= eps_cluster {
            clusters.last_mut().unwrap().push(w[1]);
        } else {
            clusters.push(vec![w[1]]);
        }
    }
    for c in &clusters {
        let spread = c.last().unwrap() - c[0];
        if spread > eps_cluster {
            return Err(Error::GroupingInfeasible(format!(
                "cluster spread {spread:.3e} exceeds ε_cluster {eps_cluster:.3e}"
            )));
        }
    }
    for pair in clusters.windows(2) {
        let gap = pair[1][0] - pair[0].last().unwrap();
        if gap < gap_min {
            return Err(Error::GroupingInfeasible(format!("inter-set gap {gap:.3e} below gap_min {gap_min:.3e}")));
        }
        if gap < 3.0 * gap_min {
            log::warn!("marginal separation between frequency sets: gap {gap:.3e}, gap_min {gap_min:.3e}");
        }
    }
    let values = match policy {
        SetFrequencyPolicy::Mean => clusters.iter().map(|c| mean(c)).collect::<Vec<_>>(),
        SetFrequencyPolicy::Explicit(v) => {
            if v.len() != clusters.len() {
                return Err(Error::GroupingInfeasible(format!(
                    "{} explicit set frequencies for {} sets",
                    v.len(),
                    clusters.len()
                )));
            }
            v.clone()
        }
    };
    let sets = clusters
        .into_iter()
        .zip(values)
        .map(|(c, w)| FrequencySet { members: c.into_iter().map(Transition::new).collect(), frequency: w })
        .collect();
    Ok(FrequencyGrouping { sets, eps_cluster, gap_min })
}

/// Sum of the member components of one set for one (bath, channel).
#[derive(Debug, Clone)]
pub struct GroupedJump {
    /// Set frequency, negative for mirrored sets.
    pub frequency: f64,
    pub operator: Operator,
    pub bath_id: String,
    pub channel: i32,
    pub charge: i32,
}

/// Sums components per (bath, channel, set); negative-frequency components are
/// summed per mirrored set.
pub fn build_grouped_jumps(components: &[BohrComponent], grouping: &FrequencyGrouping) -> Result<Vec<GroupedJump>> {
    // key: bath order, channel, sign, set
    let mut bath_order: Vec<&str> = Vec::new();
    let mut acc: BTreeMap<(usize, i32, i8, Option<usize>), GroupedJump> = BTreeMap::new();
    for c in components {
        let b = match bath_order.iter().position(|&x| x == c.bath_id) {
            Some(i) => i,
            None => {
                bath_order.push(&c.bath_id);
                bath_order.len() - 1
            }
        };
        let a = grouping.assign(c)?;
        let sign = if c.frequency > 0.0 {
            1
        } else if c.frequency < 0.0 {
            -1
        } else {
            0
        };
        match acc.get_mut(&(b, c.channel, sign, a.set)) {
            Some(j) => j.operator = j.operator.try_add(&c.operator)?,
            None => {
                acc.insert(
                    (b, c.channel, sign, a.set),
                    GroupedJump {
                        frequency: a.frequency,
                        operator: c.operator.clone(),
                        bath_id: c.bath_id.clone(),
                        channel: c.channel,
                        charge: c.charge,
                    },
                );
            }
        }
    }
    Ok(acc.into_values().collect())
}
