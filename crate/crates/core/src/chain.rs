//! Finite-state economy process: a time-homogeneous continuous-time Markov
//! chain described by state values, exit rates and a jump matrix.
//!
//! States are 0-based in this API. Configuration files and CLI output use
//! 1-based labels.

use nalgebra::{DMatrix, DVector};
use rand::Rng;
use rand_distr::{Distribution, Exp1};

use crate::error::{Error, Result};

const ROW_SUM_TOL: f64 = 1e-12;

/// Validated chain description. Immutable once built.
#[derive(Debug, Clone, PartialEq)]
pub struct ChainSpec {
    values: Vec<f64>,
    exit_rates: Vec<f64>,
    jumps: Vec<Vec<f64>>,
    // Running sums of each jump row, used for sampling the next state.
    cumulative: Vec<Vec<f64>>,
}

impl ChainSpec {
    /// Builds a chain from state values `x`, exit rates `v` and jump matrix `P`.
    ///
    /// Rows of `P` belonging to absorbing states (`v_i = 0`) are not checked
    /// for stochasticity; a single-state chain must be absorbing.
    pub fn new(values: Vec<f64>, exit_rates: Vec<f64>, jumps: Vec<Vec<f64>>) -> Result<Self> {
        let m = values.len();
        if m == 0 {
            return Err(Error::invalid("chain.states", "at least one state is required"));
        }
        if exit_rates.len() != m {
            return Err(Error::invalid(
                "chain.exit_rates",
                format!("expected {m} rates, got {}", exit_rates.len()),
            ));
        }
        if jumps.len() != m {
            return Err(Error::invalid(
                "chain.transitions",
                format!("expected {m} rows, got {}", jumps.len()),
            ));
        }
        if let Some(i) = values.iter().position(|x| !x.is_finite()) {
            return Err(Error::invalid(
                "chain.states",
                format!("state {} has a non-finite value", i + 1),
            ));
        }
        for (i, &v) in exit_rates.iter().enumerate() {
            if v < 0.0 || !v.is_finite() {
                return Err(Error::invalid(
                    "chain.exit_rates",
                    format!("rate for state {} must be finite and >= 0, got {v}", i + 1),
                ));
            }
        }
        if m == 1 && exit_rates[0] != 0.0 {
            return Err(Error::invalid(
                "chain.exit_rates",
                "a single-state chain must be absorbing (rate 0)",
            ));
        }
        for (i, row) in jumps.iter().enumerate() {
            let ctx = format!("chain.transitions row {}", i + 1);
            if row.len() != m {
                return Err(Error::invalid(ctx, format!("expected {m} entries, got {}", row.len())));
            }
            if exit_rates[i] == 0.0 {
                continue;
            }
            if row[i] != 0.0 {
                return Err(Error::invalid(ctx, "diagonal entry must be 0"));
            }
            if row.iter().any(|p| *p < 0.0 || !p.is_finite()) {
                return Err(Error::invalid(ctx, "entries must be finite and >= 0"));
            }
            let sum: f64 = row.iter().sum();
            if (sum - 1.0).abs() > ROW_SUM_TOL {
                return Err(Error::invalid(ctx, format!("row sums to {sum}, expected 1")));
            }
        }
        let cumulative = jumps
            .iter()
            .map(|row| {
                row.iter()
                    .scan(0.0, |acc, p| {
                        *acc += p;
                        Some(*acc)
                    })
                    .collect()
            })
            .collect();
        Ok(Self {
            values,
            exit_rates,
            jumps,
            cumulative,
        })
    }

    /// Chain where every exit is spread evenly over the other states.
    pub fn uniform_jumps(values: Vec<f64>, exit_rates: Vec<f64>) -> Result<Self> {
        let m = values.len();
        let jumps = (0..m)
            .map(|i| {
                (0..m)
                    .map(|j| if i == j || m == 1 { 0.0 } else { 1.0 / (m - 1) as f64 })
                    .collect()
            })
            .collect();
        Self::new(values, exit_rates, jumps)
    }

    /// Single absorbing state with value `x`: a constant environment.
    pub fn constant(x: f64) -> Result<Self> {
        Self::new(vec![x], vec![0.0], vec![vec![0.0]])
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn exit_rates(&self) -> &[f64] {
        &self.exit_rates
    }

    pub fn jumps(&self) -> &[Vec<f64>] {
        &self.jumps
    }

    pub(crate) fn check_state(&self, state: usize) -> Result<()> {
        if state < self.len() {
            Ok(())
        } else {
            Err(Error::invalid(
                "initial state",
                format!("state {} outside 1..={}", state + 1, self.len()),
            ))
        }
    }

    /// Generator `Q`: `Q_ii = -v_i`, `Q_ij = v_i p_ij`.
    pub fn generator(&self) -> DMatrix<f64> {
        let m = self.len();
        DMatrix::from_fn(m, m, |i, j| {
            if i == j {
                -self.exit_rates[i]
            } else {
                self.exit_rates[i] * self.jumps[i][j]
            }
        })
    }

    /// Stationary law `π` solving `π Q = 0`, `Σ π = 1`. Fails for chains
    /// without a unique stationary distribution.
    pub fn stationary_distribution(&self) -> Result<DVector<f64>> {
        let m = self.len();
        let mut system = self.generator().transpose();
        for j in 0..m {
            system[(m - 1, j)] = 1.0;
        }
        let mut rhs = DVector::zeros(m);
        rhs[m - 1] = 1.0;
        system
            .lu()
            .solve(&rhs)
            .ok_or_else(|| Error::Degenerate("chain has no unique stationary distribution".into()))
    }

    fn next_state<R: Rng + ?Sized>(&self, from: usize, rng: &mut R) -> usize {
        let u: f64 = rng.random();
        let row = &self.cumulative[from];
        let total = row[row.len() - 1];
        let target = u * total;
        row.iter()
            .position(|&c| target < c)
            .or_else(|| self.jumps[from].iter().rposition(|&p| p > 0.0))
            .unwrap_or(from)
    }

    /// Exact path on `[0, horizon]`: exponential holding times with rate
    /// `v_i`, next state drawn from row `i` of the jump matrix. The final
    /// segment is truncated at the horizon.
    pub fn sample_path<R: Rng + ?Sized>(
        &self,
        initial: usize,
        horizon: f64,
        rng: &mut R,
    ) -> Result<ChainPath> {
        self.check_state(initial)?;
        if horizon <= 0.0 || !horizon.is_finite() {
            return Err(Error::invalid("horizon", format!("{horizon} must be finite and > 0")));
        }
        let mut path = ChainPath {
            states: self.len(),
            initial,
            segments: Vec::new(),
            horizon,
        };
        let mut t = 0.0;
        let mut state = initial;
        loop {
            let rate = self.exit_rates[state];
            let hold = if rate > 0.0 {
                let e: f64 = Exp1.sample(rng);
                e / rate
            } else {
                f64::INFINITY
            };
            if t + hold >= horizon {
                path.push(state, horizon - t);
                break;
            }
            path.push(state, hold);
            t += hold;
            state = self.next_state(state, rng);
        }
        Ok(path)
    }
}

/// One piece of a sampled path: the chain sits in `state` for `duration`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Segment {
    pub state: usize,
    pub duration: f64,
}

/// Realization of the chain on `[0, horizon]`.
#[derive(Debug, Clone, PartialEq)]
pub struct ChainPath {
    states: usize,
    initial: usize,
    segments: Vec<Segment>,
    horizon: f64,
}

impl ChainPath {
    /// Assembles a path from explicit segments (mainly for fixtures).
    /// Zero-length segments are dropped and repeated states merged.
    pub fn from_segments(states: usize, segments: &[(usize, f64)]) -> Result<Self> {
        let first = segments
            .first()
            .ok_or_else(|| Error::invalid("path", "at least one segment is required"))?;
        let mut path = ChainPath {
            states,
            initial: first.0,
            segments: Vec::new(),
            horizon: 0.0,
        };
        for &(state, duration) in segments {
            if state >= states {
                return Err(Error::invalid("path", format!("state {} outside 1..={states}", state + 1)));
            }
            if duration < 0.0 || !duration.is_finite() {
                return Err(Error::invalid("path", format!("bad duration {duration}")));
            }
            path.push(state, duration);
        }
        path.horizon = path.segments.iter().map(|s| s.duration).sum();
        if path.horizon <= 0.0 {
            return Err(Error::invalid("path", "total duration must be > 0"));
        }
        Ok(path)
    }

    fn push(&mut self, state: usize, duration: f64) {
        if duration <= 0.0 {
            return;
        }
        match self.segments.last_mut() {
            Some(last) if last.state == state => last.duration += duration,
            _ => self.segments.push(Segment { state, duration }),
        }
    }

    pub fn initial_state(&self) -> usize {
        self.initial
    }

    pub fn horizon(&self) -> f64 {
        self.horizon
    }

    pub fn segments(&self) -> &[Segment] {
        &self.segments
    }

    /// Segments with their absolute start times.
    pub fn timed_segments(&self) -> impl Iterator<Item = (f64, Segment)> + '_ {
        self.segments.iter().scan(0.0, |start, seg| {
            let s = *start;
            *start += seg.duration;
            Some((s, *seg))
        })
    }

    /// State occupied at time `t` (right-continuous); the last state for `t >= horizon`.
    pub fn state_at(&self, t: f64) -> usize {
        let mut end = 0.0;
        for seg in &self.segments {
            end += seg.duration;
            if t < end {
                return seg.state;
            }
        }
        self.segments.last().map_or(self.initial, |s| s.state)
    }

    /// `∫_a^b f(X_s) ds` for a per-state function `f`, with `0 <= a <= b <= horizon`.
    pub fn integrate(&self, f: impl Fn(usize) -> f64, a: f64, b: f64) -> f64 {
        let mut total = 0.0;
        for (start, seg) in self.timed_segments() {
            let lo = start.max(a);
            let hi = (start + seg.duration).min(b);
            if hi > lo {
                total += f(seg.state) * (hi - lo);
            }
        }
        total
    }

    /// Time spent in each state over `[0, horizon]`.
    pub fn occupation_times(&self) -> Vec<f64> {
        let mut out = vec![0.0; self.states];
        for seg in &self.segments {
            out[seg.state] += seg.duration;
        }
        out
    }
}
