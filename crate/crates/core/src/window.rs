//! Windowed density evolution for SC-LDPC(L, R, N, w).
//!
//! `x_z` is the erasure probability of a message entering the check nodes at
//! position `z ∈ [1, N + w − 1]`; reads outside that range are 0. Within the
//! `c`-th window configuration the positions `z ∈ [c, c + W − 1]` are updated
//! in parallel by
//!
//! ```text
//! f(z, x) = (1/w) Σ_{k=0}^{w−1} ε_{z−k} λ(1 − (1/w) Σ_{j=0}^{w−1} ρ(1 − x_{z+j−k}))
//! ```
//!
//! and every other position is left untouched. After `T` sweeps the window
//! slides one position to the right.
//!
//! Positions are 1-based throughout the public API.

use std::collections::BTreeMap;
use std::fmt;
use std::ops::RangeInclusive;

use crate::error::{Error, Result};
use crate::scalar::UncoupledEnsemble;

pub const DEFAULT_SUCCESS_THRESHOLD: f64 = 1e-6;

/// SC-LDPC(L, R, N, w) on a BEC with erasure probability `epsilon`.
#[derive(Debug, Clone, PartialEq)]
pub struct CoupledSpec {
    ens: UncoupledEnsemble,
    n: usize,
    w: usize,
    epsilon: f64,
}

impl CoupledSpec {
    pub fn new(ens: UncoupledEnsemble, n: usize, w: usize, epsilon: f64) -> Result<Self> {
        if n == 0 || w == 0 {
            return Err(Error::InvalidParameter(format!(
                "coupling length and width must be at least 1 (N = {n}, w = {w})"
            )));
        }
        if !(0.0..=1.0).contains(&epsilon) {
            return Err(Error::InvalidParameter(format!(
                "epsilon must lie in [0, 1], got {epsilon}"
            )));
        }
        Ok(Self { ens, n, w, epsilon })
    }

    pub fn with_epsilon(&self, epsilon: f64) -> Result<Self> {
        Self::new(self.ens.clone(), self.n, self.w, epsilon)
    }

    pub fn ensemble(&self) -> &UncoupledEnsemble {
        &self.ens
    }
    pub fn n(&self) -> usize {
        self.n
    }
    pub fn w(&self) -> usize {
        self.w
    }
    pub fn epsilon(&self) -> f64 {
        self.epsilon
    }

    /// Number of check positions, `N + w − 1`.
    pub fn positions(&self) -> usize {
        self.n + self.w - 1
    }

    /// Channel profile: `ε` on `[1, N]`, zero elsewhere.
    #[inline]
    pub fn channel(&self, z: isize) -> f64 {
        if z >= 1 && z as usize <= self.n {
            self.epsilon
        } else {
            0.0
        }
    }
}

/// Window size `W` and iterations per window configuration `T`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct WindowSchedule {
    pub window: usize,
    pub iterations: usize,
}

impl WindowSchedule {
    pub fn new(window: usize, iterations: usize) -> Result<Self> {
        if window == 0 || iterations == 0 {
            return Err(Error::InvalidParameter(format!(
                "window size and iterations must be at least 1 (W = {window}, T = {iterations})"
            )));
        }
        Ok(Self { window, iterations })
    }

    /// Positions covered by configuration `c`.
    pub fn covers(&self, c: usize) -> RangeInclusive<usize> {
        c..=c + self.window - 1
    }
}

/// How far the window travels.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum ScheduleVariant {
    /// `c ∈ [1, N − W + 1]`: the window never covers positions beyond `N`, so
    /// `x_z` for `z ∈ [N + 1, N + w − 1]` keeps its initial value 1.
    #[default]
    Literal,
    /// `c ∈ [1, N + w − W]`: the last window reaches the terminating checks.
    Extended,
}

impl ScheduleVariant {
    pub fn last_window(self, spec: &CoupledSpec, sched: &WindowSchedule) -> Result<usize> {
        let reach = match self {
            ScheduleVariant::Literal => spec.n,
            ScheduleVariant::Extended => spec.positions(),
        };
        if sched.window > reach {
            return Err(Error::InvalidParameter(format!(
                "window size {} exceeds the {reach} positions the schedule can cover",
                sched.window
            )));
        }
        Ok(reach - sched.window + 1)
    }
}

/// Position-indexed erasure vector together with the schedule position
/// `(c, t)`.
#[derive(Debug, Clone, PartialEq)]
pub struct DEState {
    x: Vec<f64>,
    c: usize,
    t: usize,
}

impl DEState {
    /// `x_z`, or 0 for `z ∉ [1, N + w − 1]`.
    #[inline]
    pub fn get(&self, z: isize) -> f64 {
        read(&self.x, z)
    }

    /// Values for `z = 1 ..= N + w − 1`, stored at index `z − 1`.
    pub fn values(&self) -> &[f64] {
        &self.x
    }

    /// Current window configuration `c`.
    pub fn window(&self) -> usize {
        self.c
    }

    /// Iterations completed within the current configuration.
    pub fn iteration(&self) -> usize {
        self.t
    }

    /// Builds a state from explicit values, mainly for tests and analysis.
    pub fn from_values(x: Vec<f64>, c: usize, t: usize) -> Self {
        Self { x, c, t }
    }
}

#[inline]
pub(crate) fn read(x: &[f64], z: isize) -> f64 {
    if z >= 1 && (z as usize) <= x.len() {
        x[z as usize - 1]
    } else {
        0.0
    }
}

/// All-ones state at `(c, t) = (1, 0)`.
pub fn init_state(spec: &CoupledSpec) -> DEState {
    DEState {
        x: vec![1.0; spec.positions()],
        c: 1,
        t: 0,
    }
}

/// Evaluates the update rule at position `z` against `state`.
///
/// In-window positions get the double average; any other position returns
/// its stored value.
pub fn f_update(z: usize, state: &DEState, spec: &CoupledSpec, sched: &WindowSchedule) -> f64 {
    if !sched.covers(state.c).contains(&z) {
        return state.get(z as isize);
    }
    f_value(z as isize, &state.x, spec)
}

/// The in-window branch of the update rule, evaluated on an arbitrary vector.
pub(crate) fn f_value(z: isize, x: &[f64], spec: &CoupledSpec) -> f64 {
    let ens = spec.ensemble();
    let w = spec.w as isize;
    let mut acc = 0.0;
    for k in 0..w {
        let mut inner = 0.0;
        for j in 0..w {
            inner += ens.check_erasure(read(x, z + j - k));
        }
        acc += spec.channel(z - k) * ens.lambda().eval(inner / w as f64);
    }
    acc / w as f64
}

/// Erasure probability of the bit decision at position `z`:
/// `ε_z L(1 − (1/w) Σ_j ρ(1 − x_{z+j}))`.
pub fn bit_erasure(x: &[f64], spec: &CoupledSpec, z: isize) -> f64 {
    let ens = spec.ensemble();
    let w = spec.w as isize;
    let mut inner = 0.0;
    for j in 0..w {
        inner += ens.check_erasure(read(x, z + j));
    }
    spec.channel(z) * ens.l().eval(inner / w as f64)
}

/// Scratch space for repeated sweeps of one window.
#[derive(Debug, Default)]
struct Sweeper {
    check: Vec<f64>,
    var: Vec<f64>,
}

impl Sweeper {
    /// One flooding sweep of configuration `c` in place. Returns the largest
    /// absolute change.
    fn sweep(
        &mut self,
        x: &mut [f64],
        c: usize,
        spec: &CoupledSpec,
        sched: &WindowSchedule,
    ) -> f64 {
        let ens = spec.ensemble();
        let w = spec.w;
        let wf = w as f64;
        let first_var = c as isize - w as isize + 1;
        let vars = sched.window + w - 1;
        // check_erasure at positions first_var ..= first_var + vars + w - 2
        self.check.clear();
        self.check
            .extend((0..vars + w - 1).map(|i| ens.check_erasure(read(x, first_var + i as isize))));
        self.var.clear();
        self.var.extend((0..vars).map(|i| {
            let inner: f64 = self.check[i..i + w].iter().fold(0.0, |a, &v| a + v);
            spec.channel(first_var + i as isize) * ens.lambda().eval(inner / wf)
        }));
        let mut delta: f64 = 0.0;
        for (offset, z) in sched.covers(c).enumerate() {
            if z > x.len() {
                break;
            }
            // g_{z-k} for k = 0..w lives at var[offset + w - 1 - k]
            let mut acc = 0.0;
            for k in 0..w {
                acc += self.var[offset + w - 1 - k];
            }
            let next = acc / wf;
            delta = delta.max((next - x[z - 1]).abs());
            x[z - 1] = next;
        }
        delta
    }

    fn settle(
        &mut self,
        x: &mut [f64],
        c: usize,
        spec: &CoupledSpec,
        sched: &WindowSchedule,
        settle: Settle,
    ) -> usize {
        for i in 1..=settle.max_sweeps {
            if self.sweep(x, c, spec, sched) <= settle.tol {
                return i;
            }
        }
        settle.max_sweeps
    }
}

/// Applies one parallel sweep of the current window configuration and
/// advances `t`.
pub fn window_sweep(state: &mut DEState, spec: &CoupledSpec, sched: &WindowSchedule) -> Result<()> {
    if state.t >= sched.iterations {
        return Err(Error::WindowIncomplete {
            c: state.c,
            t: state.t,
            expected: sched.iterations,
        });
    }
    Sweeper::default().sweep(&mut state.x, state.c, spec, sched);
    state.t += 1;
    Ok(())
}

/// Moves to configuration `c + 1` with `t = 0`; the vector is unchanged.
pub fn slide(
    state: &mut DEState,
    spec: &CoupledSpec,
    sched: &WindowSchedule,
    variant: ScheduleVariant,
) -> Result<()> {
    let last = variant.last_window(spec, sched)?;
    if state.c >= last {
        return Err(Error::ScheduleExhausted { last });
    }
    if state.t != sched.iterations {
        return Err(Error::WindowIncomplete {
            c: state.c,
            t: state.t,
            expected: sched.iterations,
        });
    }
    state.c += 1;
    state.t = 0;
    Ok(())
}

/// Which states a run keeps.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub enum RecordPolicy {
    #[default]
    None,
    /// Only the state at the end of the run.
    FinalOnly,
    /// Every `x^{(c,t)}`, `t = 0..=T`, for the listed configurations.
    Windows(RangeInclusive<usize>),
    AllWindows,
}

impl RecordPolicy {
    fn keeps(&self, c: usize) -> bool {
        match self {
            RecordPolicy::Windows(r) => r.contains(&c),
            RecordPolicy::AllWindows => true,
            _ => false,
        }
    }
}

/// Iterate-to-convergence budget used by the warm-start and flush phases.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Settle {
    /// Stop once a sweep changes no position by more than this.
    pub tol: f64,
    pub max_sweeps: usize,
}

impl Default for Settle {
    fn default() -> Self {
        Self {
            tol: 1e-15,
            max_sweeps: 100_000,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Default)]
pub struct RunOptions {
    pub variant: ScheduleVariant,
    /// Run the first configuration to convergence before its `T` regular
    /// sweeps, so the decoding wave is fully formed at the left boundary.
    pub warm_start: bool,
    /// Run the last configuration to convergence after its `T` regular
    /// sweeps.
    pub flush: bool,
    pub settle: Settle,
    pub record: RecordPolicy,
}

impl RunOptions {
    /// The literal schedule with no extra iterations.
    pub fn literal() -> Self {
        Self::default()
    }

    /// Extended schedule with warm start and flush, the setup the speed
    /// presets use.
    pub fn reproduction() -> Self {
        Self {
            variant: ScheduleVariant::Extended,
            warm_start: true,
            flush: true,
            ..Self::default()
        }
    }

    pub fn recording(mut self, record: RecordPolicy) -> Self {
        self.record = record;
        self
    }
}

/// Recorded states of a run.
#[derive(Debug, Clone, PartialEq)]
pub struct Trajectory {
    pub iterations: usize,
    windows: BTreeMap<usize, Vec<Vec<f64>>>,
    final_state: Option<Vec<f64>>,
}

impl Trajectory {
    fn new(iterations: usize) -> Self {
        Self {
            iterations,
            windows: BTreeMap::new(),
            final_state: None,
        }
    }

    /// `x^{(c,t)}` as stored values (`z − 1` indexing).
    pub fn state(&self, c: usize, t: usize) -> Option<&[f64]> {
        self.windows.get(&c)?.get(t).map(Vec::as_slice)
    }

    /// `x_z^{(c,t)}` with the boundary-zero convention.
    pub fn value(&self, c: usize, t: usize, z: isize) -> Option<f64> {
        self.state(c, t).map(|x| read(x, z))
    }

    /// Recorded configurations in ascending order.
    pub fn windows(&self) -> impl Iterator<Item = usize> + '_ {
        self.windows.keys().copied()
    }

    pub fn contains(&self, c: usize) -> bool {
        self.windows.contains_key(&c)
    }

    pub fn final_state(&self) -> Option<&[f64]> {
        self.final_state.as_deref()
    }

    /// Iterates `(c, t, states)` rows.
    pub fn iter(&self) -> impl Iterator<Item = (usize, usize, &[f64])> + '_ {
        self.windows.iter().flat_map(|(&c, ts)| {
            ts.iter()
                .enumerate()
                .map(move |(t, x)| (c, t, x.as_slice()))
        })
    }
}

/// Outcome of [`run_wd`].
#[derive(Debug, Clone, PartialEq)]
pub struct WdRun {
    pub final_state: DEState,
    pub trajectory: Option<Trajectory>,
    /// `x_z` at the moment position `z ∈ [1, N]` is decided: when the window
    /// leaves it, or at the end of the run for positions in the last window.
    pub decided_message: Vec<f64>,
    /// Bit erasure probability of position `z` at the same moment.
    pub decided_bit: Vec<f64>,
    pub last_window: usize,
}

/// Runs the whole windowed decoder.
pub fn run_wd(spec: &CoupledSpec, sched: &WindowSchedule, opts: &RunOptions) -> Result<WdRun> {
    let last = opts.variant.last_window(spec, sched)?;
    let n = spec.n;
    let mut state = init_state(spec);
    let mut sweeper = Sweeper::default();
    let mut trajectory = match opts.record {
        RecordPolicy::None => None,
        _ => Some(Trajectory::new(sched.iterations)),
    };
    let mut decided_message = vec![0.0; n];
    let mut decided_bit = vec![0.0; n];

    if opts.warm_start {
        sweeper.settle(&mut state.x, 1, spec, sched, opts.settle);
    }
    loop {
        let c = state.c;
        let keep = opts.record.keeps(c);
        let mut states = Vec::new();
        if keep {
            states.reserve(sched.iterations + 1);
            states.push(state.x.clone());
        }
        for _ in 0..sched.iterations {
            sweeper.sweep(&mut state.x, c, spec, sched);
            state.t += 1;
            if keep {
                states.push(state.x.clone());
            }
        }
        if let (true, Some(traj)) = (keep, trajectory.as_mut()) {
            traj.windows.insert(c, states);
        }
        if c == last {
            break;
        }
        if c <= n {
            decided_message[c - 1] = state.x[c - 1];
            decided_bit[c - 1] = bit_erasure(&state.x, spec, c as isize);
        }
        slide(&mut state, spec, sched, opts.variant)?;
    }
    if opts.flush {
        sweeper.settle(&mut state.x, last, spec, sched, opts.settle);
    }
    for z in last..=n {
        decided_message[z - 1] = state.x[z - 1];
        decided_bit[z - 1] = bit_erasure(&state.x, spec, z as isize);
    }
    if let (RecordPolicy::FinalOnly, Some(traj)) = (&opts.record, trajectory.as_mut()) {
        traj.final_state = Some(state.x.clone());
    }
    Ok(WdRun {
        final_state: state,
        trajectory,
        decided_message,
        decided_bit,
        last_window: last,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Statistic {
    #[default]
    Average,
    Max,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Quantity {
    /// Message erasure probability `x_z`.
    #[default]
    Message,
    /// Bit erasure probability `ε_z L(1 − ρ̄_z)`.
    Bit,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Evaluation {
    /// Values of the final state.
    #[default]
    Final,
    /// Values at the moment each position leaves the window.
    Decision,
}

/// Decides whether a run decoded successfully.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SuccessPolicy {
    pub statistic: Statistic,
    pub quantity: Quantity,
    pub evaluation: Evaluation,
    pub threshold: f64,
}

impl Default for SuccessPolicy {
    fn default() -> Self {
        Self {
            statistic: Statistic::Average,
            quantity: Quantity::Message,
            evaluation: Evaluation::Final,
            threshold: DEFAULT_SUCCESS_THRESHOLD,
        }
    }
}

impl SuccessPolicy {
    /// Average bit erasure probability at decision time.
    pub fn decision_bits() -> Self {
        Self {
            quantity: Quantity::Bit,
            evaluation: Evaluation::Decision,
            ..Self::default()
        }
    }
}

impl fmt::Display for SuccessPolicy {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let stat = match self.statistic {
            Statistic::Average => "average",
            Statistic::Max => "max",
        };
        let qty = match self.quantity {
            Quantity::Message => "message",
            Quantity::Bit => "bit",
        };
        let at = match self.evaluation {
            Evaluation::Final => "final",
            Evaluation::Decision => "decision",
        };
        write!(f, "{stat}-{qty}-{at}<{:e}", self.threshold)
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SuccessVerdict {
    pub success: bool,
    pub avg: f64,
    pub max: f64,
}

impl SuccessVerdict {
    fn from_values(values: impl Iterator<Item = f64>, policy: &SuccessPolicy) -> Self {
        let (mut sum, mut max, mut count) = (0.0, 0.0f64, 0usize);
        for v in values {
            sum += v;
            max = max.max(v);
            count += 1;
        }
        let avg = if count == 0 { 0.0 } else { sum / count as f64 };
        let stat = match policy.statistic {
            Statistic::Average => avg,
            Statistic::Max => max,
        };
        Self {
            success: stat < policy.threshold,
            avg,
            max,
        }
    }

    /// The value compared against the threshold.
    pub fn metric(&self, policy: &SuccessPolicy) -> f64 {
        match policy.statistic {
            Statistic::Average => self.avg,
            Statistic::Max => self.max,
        }
    }
}

/// Success test on a final state over `z ∈ [1, N]`.
pub fn decode_success(
    state: &DEState,
    spec: &CoupledSpec,
    policy: &SuccessPolicy,
) -> SuccessVerdict {
    let n = spec.n;
    match policy.quantity {
        Quantity::Message => SuccessVerdict::from_values(state.x[..n].iter().copied(), policy),
        Quantity::Bit => SuccessVerdict::from_values(
            (1..=n).map(|z| bit_erasure(&state.x, spec, z as isize)),
            policy,
        ),
    }
}

/// Success test on a whole run, honouring [`SuccessPolicy::evaluation`].
pub fn run_success(run: &WdRun, spec: &CoupledSpec, policy: &SuccessPolicy) -> SuccessVerdict {
    match policy.evaluation {
        Evaluation::Final => decode_success(&run.final_state, spec, policy),
        Evaluation::Decision => {
            let values = match policy.quantity {
                Quantity::Message => &run.decided_message,
                Quantity::Bit => &run.decided_bit,
            };
            SuccessVerdict::from_values(values.iter().copied(), policy)
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn spec(n: usize, w: usize, eps: f64) -> CoupledSpec {
        CoupledSpec::new(UncoupledEnsemble::regular(3, 6).unwrap(), n, w, eps).unwrap()
    }

    #[test]
    fn init_state_examples() {
        let s = init_state(&spec(100, 3, 0.42));
        assert_eq!(s.values().len(), 102);
        assert!(s.values().iter().all(|&v| v == 1.0));
        assert_eq!((s.window(), s.iteration()), (1, 0));
        assert_eq!(s.get(0), 0.0);
        assert_eq!(s.get(103), 0.0);
        let tiny = init_state(&spec(1, 1, 0.42));
        assert_eq!(tiny.values(), &[1.0]);
    }

    #[test]
    fn f_update_examples() {
        let sp = spec(100, 3, 0.42);
        let sched = WindowSchedule::new(11, 6).unwrap();
        let mut s = init_state(&sp);
        s.c = 40;
        // interior, all neighbours 1
        assert_eq!(f_update(45, &s, &sp, &sched), 0.42);
        // outside the window
        s.x[59] = 0.7;
        assert_eq!(f_update(60, &s, &sp, &sched), 0.7);
        let zero = DEState::from_values(vec![0.0; 102], 40, 0);
        assert_eq!(f_update(45, &zero, &sp, &sched), 0.0);
    }

    #[test]
    fn first_sweep_on_all_ones() {
        // interior positions get exactly ε, z = 1 only sees k = 0 with a
        // channel factor, and the ones-vector keeps λ(1) = 1 for every k
        let sp = spec(100, 3, 0.42);
        let sched = WindowSchedule::new(11, 6).unwrap();
        let mut s = init_state(&sp);
        window_sweep(&mut s, &sp, &sched).unwrap();
        let inner = |m: f64| (m / 3.0f64).powi(2);
        // z = 1: (1/3) ε λ(mean over j of (1 − ρ(1 − x_{1+j}))), all ones
        assert!((s.get(1) - 0.42 * inner(3.0) / 3.0).abs() < 1e-15);
        // z = 2: k = 0, 1 contribute
        assert!((s.get(2) - 2.0 * 0.42 / 3.0).abs() < 1e-15);
        for z in 3..=11 {
            assert!((s.get(z) - 0.42).abs() < 1e-15, "z = {z}");
        }
        assert_eq!(s.get(12), 1.0);
        assert_eq!(s.iteration(), 1);
    }

    #[test]
    fn sweep_matches_literal_update() {
        let sp = spec(30, 4, 0.465);
        let sched = WindowSchedule::new(8, 3).unwrap();
        let mut s = init_state(&sp);
        s.c = 5;
        for (i, v) in s.x.iter_mut().enumerate() {
            *v = 0.5 + 0.4 * ((i as f64) * 0.7).sin();
        }
        let before = s.clone();
        window_sweep(&mut s, &sp, &sched).unwrap();
        for z in 1..=sp.positions() {
            assert_eq!(
                s.get(z as isize),
                f_update(z, &before, &sp, &sched),
                "z = {z}"
            );
        }
    }

    #[test]
    fn sweep_requires_budget_and_slide_requires_completion() {
        let sp = spec(20, 3, 0.4);
        let sched = WindowSchedule::new(5, 2).unwrap();
        let mut s = init_state(&sp);
        assert!(slide(&mut s, &sp, &sched, ScheduleVariant::Literal).is_err());
        window_sweep(&mut s, &sp, &sched).unwrap();
        window_sweep(&mut s, &sp, &sched).unwrap();
        assert!(window_sweep(&mut s, &sp, &sched).is_err());
        let before = s.values().to_vec();
        slide(&mut s, &sp, &sched, ScheduleVariant::Literal).unwrap();
        assert_eq!((s.window(), s.iteration()), (2, 0));
        assert_eq!(s.values(), before.as_slice());
    }

    #[test]
    fn slide_stops_at_last_configuration() {
        let sp = spec(20, 3, 0.4);
        let sched = WindowSchedule::new(5, 1).unwrap();
        let mut s = DEState::from_values(vec![1.0; 22], 16, 1);
        assert_eq!(
            slide(&mut s, &sp, &sched, ScheduleVariant::Literal),
            Err(Error::ScheduleExhausted { last: 16 })
        );
        slide(&mut s, &sp, &sched, ScheduleVariant::Extended).unwrap();
        assert_eq!(s.window(), 17);
    }

    #[test]
    fn window_larger_than_chain_is_rejected() {
        let sp = spec(10, 3, 0.4);
        let sched = WindowSchedule::new(11, 1).unwrap();
        assert!(run_wd(&sp, &sched, &RunOptions::literal()).is_err());
        assert!(run_wd(&sp, &sched, &RunOptions::reproduction()).is_ok());
    }

    #[test]
    fn zero_channel_decodes_every_updated_position() {
        let sp = spec(40, 3, 0.0);
        let sched = WindowSchedule::new(6, 1).unwrap();
        let run = run_wd(&sp, &sched, &RunOptions::literal()).unwrap();
        assert!(run.final_state.values()[..40].iter().all(|&v| v <= 1e-12));
        assert!(run.final_state.values()[40..].iter().all(|&v| v == 1.0));
    }

    #[test]
    fn success_policy_extremes() {
        let sp = spec(10, 3, 0.4);
        let policy = SuccessPolicy::default();
        let zeros = DEState::from_values(vec![0.0; 12], 1, 0);
        let v = decode_success(&zeros, &sp, &policy);
        assert!(v.success && v.avg == 0.0);
        let ones = init_state(&sp);
        assert!(!decode_success(&ones, &sp, &policy).success);
        let strict = SuccessPolicy {
            statistic: Statistic::Max,
            ..policy
        };
        let mut x = vec![0.0; 12];
        x[3] = 5e-6;
        let one_bad = DEState::from_values(x, 1, 0);
        assert!(decode_success(&one_bad, &sp, &policy).success);
        assert!(!decode_success(&one_bad, &sp, &strict).success);
    }

    #[test]
    fn literal_schedule_leaves_tail_at_one() {
        let sp = spec(30, 3, 0.42);
        let sched = WindowSchedule::new(6, 20).unwrap();
        let run = run_wd(&sp, &sched, &RunOptions::literal()).unwrap();
        assert_eq!(&run.final_state.values()[30..], &[1.0, 1.0]);
        // the unreached terminating checks keep the end of the chain erased
        assert!(run.final_state.get(30) > 0.01);
    }

    #[test]
    fn recording_keeps_requested_windows() {
        let sp = spec(30, 3, 0.42);
        let sched = WindowSchedule::new(6, 3).unwrap();
        let opts = RunOptions::literal().recording(RecordPolicy::Windows(4..=6));
        let run = run_wd(&sp, &sched, &opts).unwrap();
        let traj = run.trajectory.unwrap();
        assert_eq!(traj.windows().collect::<Vec<_>>(), vec![4, 5, 6]);
        assert_eq!(traj.state(5, 3), traj.state(6, 0));
        assert!(traj.state(5, 4).is_none());
        let fin = run_wd(
            &sp,
            &sched,
            &RunOptions::literal().recording(RecordPolicy::FinalOnly),
        )
        .unwrap();
        assert_eq!(
            fin.trajectory.unwrap().final_state(),
            Some(fin.final_state.values())
        );
    }
}
