//! Outer minimization over the break configuration.
//!
//! Breaks are restricted to nodes of a base mesh. Small instances are
//! enumerated exhaustively (certifying the discrete optimum); larger ones use
//! a greedy local search. An optional golden-section pass then moves each
//! break continuously within its neighbouring cells.

use std::cmp::Ordering;
use std::fmt;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::breaks::{Break, BreakConfig, BreakKind};
use crate::energy::Problem;
use crate::error::{Error, Result};
use crate::mesh::{build_mesh, Mesh};
use crate::solve::{solve_fixed_with, SolveReport, DEFAULT_TOLERANCE};

/// Greedy moves must lower the energy by more than this.
pub const IMPROVEMENT_TOLERANCE: f64 = 1e-12;
/// Configurations within this (relative to `1 + |E|`) of the best are reported.
pub const TIE_TOLERANCE: f64 = 1e-9;
/// Golden-section refinement stops at this bracket width.
pub const POSITION_TOLERANCE: f64 = 1e-6;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SearchPolicy {
    /// Base-mesh node indices where breaks may sit; `None` means every node.
    pub candidate_nodes: Option<Vec<usize>>,
    pub k_max: usize,
    /// Largest number of inner solves allowed for exhaustive enumeration.
    pub exhaustive_cap: usize,
    pub refine_positions: bool,
    /// Stationarity tolerance of the inner solves.
    pub tolerance: f64,
}

impl Default for SearchPolicy {
    fn default() -> Self {
        SearchPolicy {
            candidate_nodes: None,
            k_max: 4,
            exhaustive_cap: 100_000,
            refine_positions: false,
            tolerance: DEFAULT_TOLERANCE,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Certificate {
    /// Every admissible configuration was solved: the discrete optimum.
    Exhaustive,
    /// Local search; the result is a local optimum for single moves.
    Greedy,
}

impl fmt::Display for Certificate {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Certificate::Exhaustive => "exhaustive",
            Certificate::Greedy => "greedy",
        })
    }
}

/// A configuration and its total energy.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Candidate {
    pub breaks: BreakConfig,
    pub energy: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SearchResult {
    pub best: SolveReport,
    /// Inner solves performed.
    pub explored: usize,
    pub certificate: Certificate,
    /// Energy of the unbroken minimizer.
    pub unbroken_energy: f64,
    /// Every evaluated configuration within the tie tolerance of the best.
    pub near_optimal: Vec<Candidate>,
    /// Whether break positions were refined off the base mesh.
    pub refined: bool,
}

/// `Σ_{k ≤ k_max} C(n, k) kinds^k`, saturating.
pub fn configuration_count(n: usize, kinds: usize, k_max: usize) -> u128 {
    let mut total: u128 = 0;
    let mut binom: u128 = 1;
    let mut pow: u128 = 1;
    for k in 0..=k_max.min(n) {
        if k > 0 {
            binom = binom.saturating_mul((n - k + 1) as u128) / k as u128;
            pow = pow.saturating_mul(kinds as u128);
        }
        total = total.saturating_add(binom.saturating_mul(pow));
    }
    total
}

struct Searcher<'a> {
    problem: &'a Problem,
    base: &'a Mesh,
    candidates: Vec<usize>,
    kinds: &'static [BreakKind],
    policy: &'a SearchPolicy,
}

fn order(a: &Candidate, b: &Candidate) -> Ordering {
    a.energy.total_cmp(&b.energy).then_with(|| a.breaks.lex_cmp(&b.breaks))
}

impl Searcher<'_> {
    fn config(&self, picks: &[(usize, BreakKind)]) -> BreakConfig {
        let x = self.base.nodes();
        BreakConfig::new(picks.iter().map(|&(i, k)| Break::new(x[i], k)).collect())
            .expect("distinct mesh nodes are separated")
    }

    fn solve(&self, k: &BreakConfig) -> Result<SolveReport> {
        solve_fixed_with(self.problem, &self.base.with_breaks(k)?, self.policy.tolerance)
    }

    /// Energies of `configs`, in order; evaluated concurrently.
    fn evaluate(&self, configs: Vec<BreakConfig>) -> Result<Vec<Candidate>> {
        configs
            .into_par_iter()
            .map(|breaks| {
                let energy = self.solve(&breaks)?.energy.total;
                Ok(Candidate { breaks, energy })
            })
            .collect()
    }

    fn enumerate(&self) -> Vec<BreakConfig> {
        let mut out = Vec::new();
        let mut picks: Vec<(usize, BreakKind)> = Vec::new();
        self.enumerate_from(0, &mut picks, &mut out);
        out
    }

    fn enumerate_from(&self, start: usize, picks: &mut Vec<(usize, BreakKind)>, out: &mut Vec<BreakConfig>) {
        out.push(self.config(picks));
        if picks.len() == self.policy.k_max {
            return;
        }
        for c in start..self.candidates.len() {
            for &kind in self.kinds {
                picks.push((self.candidates[c], kind));
                self.enumerate_from(c + 1, picks, out);
                picks.pop();
            }
        }
    }

    fn neighbours(&self, current: &BreakConfig) -> Vec<BreakConfig> {
        let picks: Vec<(usize, BreakKind)> = current
            .iter()
            .map(|b| (self.base.node_at(b.x).expect("breaks sit on base nodes"), b.kind))
            .collect();
        let occupied = |i: usize| picks.iter().any(|&(j, _)| j == i);
        let mut out = Vec::new();
        if picks.len() < self.policy.k_max {
            for &c in &self.candidates {
                if occupied(c) {
                    continue;
                }
                for &kind in self.kinds {
                    let mut p = picks.clone();
                    p.push((c, kind));
                    out.push(self.config(&p));
                }
            }
        }
        for idx in 0..picks.len() {
            let mut p = picks.clone();
            p.remove(idx);
            out.push(self.config(&p));
            for &kind in self.kinds.iter().filter(|&&k| k != picks[idx].1) {
                let mut p = picks.clone();
                p[idx].1 = kind;
                out.push(self.config(&p));
            }
            let pos = self.candidates.iter().position(|&c| c == picks[idx].0);
            if let Some(pos) = pos {
                let mut shifted = Vec::new();
                if pos > 0 {
                    shifted.push(self.candidates[pos - 1]);
                }
                if pos + 1 < self.candidates.len() {
                    shifted.push(self.candidates[pos + 1]);
                }
                for c in shifted {
                    if !occupied(c) {
                        let mut p = picks.clone();
                        p[idx].0 = c;
                        out.push(self.config(&p));
                    }
                }
            }
        }
        out
    }
}

fn near_optimal(all: &[Candidate], best: f64) -> Vec<Candidate> {
    let tol = TIE_TOLERANCE * (1.0 + best.abs());
    let mut out: Vec<Candidate> = all.iter().filter(|c| c.energy <= best + tol).cloned().collect();
    out.sort_by(order);
    out.dedup_by(|a, b| a.breaks == b.breaks);
    out
}

/// Minimizes the energy of `problem` over break configurations on the nodes
/// of `base` (which must itself carry no breaks).
pub fn search(problem: &Problem, base: &Mesh, policy: &SearchPolicy) -> Result<SearchResult> {
    problem.validate()?;
    if base.break_nodes().next().is_some() {
        return Err(Error::InvalidBreaks("the base mesh of a search must be unbroken".into()));
    }
    if policy.exhaustive_cap == 0 {
        return Err(Error::ParamViolation("exhaustive_cap must be positive".into()));
    }
    let candidates: Vec<usize> = match &policy.candidate_nodes {
        None => (0..base.node_count()).collect(),
        Some(c) => {
            let mut c = c.clone();
            c.sort_unstable();
            c.dedup();
            if let Some(&bad) = c.iter().find(|&&i| i >= base.node_count()) {
                return Err(Error::InvalidBreaks(format!("candidate node {bad} is not in the mesh")));
            }
            c
        }
    };
    let s = Searcher {
        problem,
        base,
        kinds: BreakKind::admissible_for(problem.kind),
        candidates,
        policy,
    };
    let count = configuration_count(s.candidates.len(), s.kinds.len(), policy.k_max);
    let unbroken = s.solve(&BreakConfig::empty())?;
    let unbroken_energy = unbroken.energy.total;

    let mut result = if count <= policy.exhaustive_cap as u128 {
        let all = s.evaluate(s.enumerate())?;
        let best = all.iter().min_by(|a, b| order(a, b)).expect("the empty configuration is always present");
        log::info!("exhaustive search over {} configurations: best {} = {}", all.len(), best.breaks, best.energy);
        SearchResult {
            best: s.solve(&best.breaks)?,
            explored: all.len(),
            certificate: Certificate::Exhaustive,
            unbroken_energy,
            near_optimal: near_optimal(&all, best.energy),
            refined: false,
        }
    } else {
        let mut current = Candidate {
            breaks: BreakConfig::empty(),
            energy: unbroken_energy,
        };
        let mut seen = vec![current.clone()];
        let mut explored = 1;
        loop {
            let moves = s.evaluate(s.neighbours(&current.breaks))?;
            explored += moves.len();
            let Some(step) = moves.iter().min_by(|a, b| order(a, b)).cloned() else {
                break;
            };
            seen.extend(moves);
            if step.energy < current.energy - IMPROVEMENT_TOLERANCE {
                log::debug!("greedy move to {} ({})", step.breaks, step.energy);
                current = step;
            } else {
                break;
            }
        }
        log::info!("greedy search ({count} configurations exceed the cap): best {} = {}", current.breaks, current.energy);
        SearchResult {
            best: s.solve(&current.breaks)?,
            explored,
            certificate: Certificate::Greedy,
            unbroken_energy,
            near_optimal: near_optimal(&seen, current.energy),
            refined: false,
        }
    };
    if policy.refine_positions {
        let n = base.element_count();
        result = refine_positions(result, problem, n, policy)?;
    }
    Ok(result)
}

const INV_PHI: f64 = 0.618_033_988_749_894_9;

/// Moves each interior break by golden-section search within the two cells
/// of a uniform `n`-element mesh around it, re-meshing and re-solving at each
/// trial. A move is kept only if it lowers the energy, so the energy never
/// increases. Breaks at ±1 stay put.
pub fn refine_positions(result: SearchResult, problem: &Problem, n: usize, policy: &SearchPolicy) -> Result<SearchResult> {
    let h = 2.0 / n as f64;
    let mut best = result.best.clone();
    let mut explored = result.explored;
    let solve_at = |k: &BreakConfig| -> Result<SolveReport> {
        solve_fixed_with(problem, &build_mesh(n, k)?, policy.tolerance)
    };
    for idx in 0..best.breaks.len() {
        let breaks: Vec<Break> = best.breaks.breaks().to_vec();
        let b = breaks[idx];
        if b.x == -1.0 || b.x == 1.0 {
            continue;
        }
        let margin = 1e-9;
        let mut lo = (b.x - h).max(-1.0 + margin);
        let mut hi = (b.x + h).min(1.0 - margin);
        if idx > 0 {
            lo = lo.max(breaks[idx - 1].x + margin);
        }
        if idx + 1 < breaks.len() {
            hi = hi.min(breaks[idx + 1].x - margin);
        }
        let trial = |x: f64| -> Result<(f64, SolveReport)> {
            let mut moved = breaks.clone();
            moved[idx].x = x;
            let r = solve_at(&BreakConfig::new(moved)?)?;
            Ok((r.energy.total, r))
        };
        let (mut a, mut d) = (lo, hi);
        let mut c1 = d - INV_PHI * (d - a);
        let mut c2 = a + INV_PHI * (d - a);
        let (mut f1, mut r1) = trial(c1)?;
        let (mut f2, mut r2) = trial(c2)?;
        explored += 2;
        let mut local_best: Option<SolveReport> = None;
        let consider = |f: f64, r: &SolveReport, lb: &mut Option<SolveReport>| {
            let cur = lb.as_ref().map_or(best.energy.total, |x| x.energy.total);
            if f < cur {
                *lb = Some(r.clone());
            }
        };
        consider(f1, &r1, &mut local_best);
        consider(f2, &r2, &mut local_best);
        while d - a > POSITION_TOLERANCE {
            if f1 <= f2 {
                d = c2;
                c2 = c1;
                f2 = f1;
                r2 = r1.clone();
                c1 = d - INV_PHI * (d - a);
                (f1, r1) = trial(c1)?;
                consider(f1, &r1, &mut local_best);
            } else {
                a = c1;
                c1 = c2;
                f1 = f2;
                r1 = r2.clone();
                c2 = a + INV_PHI * (d - a);
                (f2, r2) = trial(c2)?;
                consider(f2, &r2, &mut local_best);
            }
            explored += 1;
        }
        if let Some(r) = local_best {
            log::debug!("break {idx} moved from {} to {}", b.x, r.breaks.breaks()[idx].x);
            best = r;
        }
    }
    let refined = best.breaks != result.best.breaks;
    let mut near = result.near_optimal;
    if refined {
        near = vec![Candidate {
            breaks: best.breaks.clone(),
            energy: best.energy.total,
        }];
    }
    Ok(SearchResult {
        best,
        explored,
        certificate: result.certificate,
        unbroken_energy: result.unbroken_energy,
        near_optimal: near,
        refined,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn configuration_counts() {
        assert_eq!(configuration_count(3, 2, 0), 1);
        assert_eq!(configuration_count(3, 2, 1), 1 + 6);
        assert_eq!(configuration_count(3, 2, 2), 1 + 6 + 3 * 4);
        assert_eq!(configuration_count(33, 2, 2), 1 + 66 + 528 * 4);
        assert_eq!(configuration_count(2, 1, 5), 4);
    }
}
