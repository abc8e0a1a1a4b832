//! Dense statevector simulation.
//!
//! Amplitudes are little-endian: bit `q` of the basis index is qubit `q`.

use std::collections::BTreeMap;
use std::fmt;

use dkhub_core::circuits::{Circuit, Gate};
use dkhub_core::compile::{hadamard_test_circuit, CompileError};
use dkhub_core::dk_mapping::{single_majorana, MajoranaKind, MappingError};
use dkhub_core::embed::Placement;
use dkhub_core::pauli::{Letter, PauliString};
use num_complex::Complex64;
use rand::distributions::{Distribution, WeightedIndex};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

/// Default qubit cap.
pub const DEFAULT_CAP: usize = 26;

#[derive(Debug, Clone, PartialEq)]
pub enum SimError {
    CapExceeded { n_qubits: usize, cap: usize },
    SizeMismatch { expected: usize, got: usize },
    QubitOutOfRange { qubit: usize, n_qubits: usize },
    EmptyQubitSet,
    ZeroShots,
    BadProbability(f64),
    NotNormalized(f64),
}

impl fmt::Display for SimError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            SimError::CapExceeded { n_qubits, cap } => {
                write!(f, "{n_qubits} qubits exceed the simulator cap of {cap}")
            }
            SimError::SizeMismatch { expected, got } => write!(f, "expected {expected} qubits, got {got}"),
            SimError::QubitOutOfRange { qubit, n_qubits } => {
                write!(f, "qubit {qubit} out of range for {n_qubits} qubits")
            }
            SimError::EmptyQubitSet => f.write_str("no qubits to measure"),
            SimError::ZeroShots => f.write_str("shots must be at least 1"),
            SimError::BadProbability(p) => write!(f, "probability {p} outside [0, 1)"),
            SimError::NotNormalized(n) => write!(f, "state norm {n} is not 1"),
        }
    }
}

impl std::error::Error for SimError {}

/// `2^n` complex amplitudes.
#[derive(Debug, Clone, PartialEq)]
pub struct Statevector {
    n_qubits: usize,
    amps: Vec<Complex64>,
}

const ONE: Complex64 = Complex64::new(1.0, 0.0);
const I: Complex64 = Complex64::new(0.0, 1.0);

impl Statevector {
    /// `|0…0⟩`.
    pub fn zero(n_qubits: usize, cap: usize) -> Result<Self, SimError> {
        Self::basis(n_qubits, 0, cap)
    }

    /// Computational basis state `|index⟩`.
    pub fn basis(n_qubits: usize, index: usize, cap: usize) -> Result<Self, SimError> {
        if n_qubits > cap {
            return Err(SimError::CapExceeded { n_qubits, cap });
        }
        let mut amps = vec![Complex64::new(0.0, 0.0); 1 << n_qubits];
        amps[index] = ONE;
        Ok(Statevector { n_qubits, amps })
    }

    pub fn from_amplitudes(amps: Vec<Complex64>) -> Result<Self, SimError> {
        let n_qubits = amps.len().trailing_zeros() as usize;
        if amps.len() != 1 << n_qubits {
            return Err(SimError::SizeMismatch { expected: 1 << n_qubits, got: amps.len() });
        }
        Ok(Statevector { n_qubits, amps })
    }

    pub fn n_qubits(&self) -> usize {
        self.n_qubits
    }

    pub fn amplitudes(&self) -> &[Complex64] {
        &self.amps
    }

    pub fn norm(&self) -> f64 {
        self.amps.iter().map(|a| a.norm_sqr()).sum::<f64>().sqrt()
    }

    /// `⟨self|other⟩`.
    pub fn inner(&self, other: &Statevector) -> Result<Complex64, SimError> {
        self.same_size(other.n_qubits)?;
        Ok(self.amps.iter().zip(&other.amps).map(|(a, b)| a.conj() * b).sum())
    }

    /// The same state with `extra` qubits in `|0⟩` appended on top.
    pub fn widened(&self, extra: usize, cap: usize) -> Result<Statevector, SimError> {
        let n = self.n_qubits + extra;
        if n > cap {
            return Err(SimError::CapExceeded { n_qubits: n, cap });
        }
        let mut amps = self.amps.clone();
        amps.resize(1 << n, Complex64::new(0.0, 0.0));
        Ok(Statevector { n_qubits: n, amps })
    }

    fn same_size(&self, n: usize) -> Result<(), SimError> {
        if n != self.n_qubits {
            return Err(SimError::SizeMismatch { expected: self.n_qubits, got: n });
        }
        Ok(())
    }

    fn check_qubit(&self, q: usize) -> Result<(), SimError> {
        if q >= self.n_qubits {
            return Err(SimError::QubitOutOfRange { qubit: q, n_qubits: self.n_qubits });
        }
        Ok(())
    }

    fn apply_1q(&mut self, q: usize, m: [[Complex64; 2]; 2]) {
        let bit = 1usize << q;
        for i in 0..self.amps.len() {
            if i & bit == 0 {
                let (a, b) = (self.amps[i], self.amps[i | bit]);
                self.amps[i] = m[0][0] * a + m[0][1] * b;
                self.amps[i | bit] = m[1][0] * a + m[1][1] * b;
            }
        }
    }

    fn phase_1q(&mut self, q: usize, p0: Complex64, p1: Complex64) {
        let bit = 1usize << q;
        for (i, a) in self.amps.iter_mut().enumerate() {
            *a *= if i & bit == 0 { p0 } else { p1 };
        }
    }

    /// Applies `string` to the basis states where `mask` bits are all set.
    fn apply_pauli_masked(&mut self, string: &PauliString, mask: usize) {
        let xm = string.x_words().first().copied().unwrap_or(0) as usize;
        if xm == 0 {
            for (i, a) in self.amps.iter_mut().enumerate() {
                if i & mask == mask {
                    *a *= string.apply_to_basis(i as u64).1;
                }
            }
            return;
        }
        for i in 0..self.amps.len() {
            let j = i ^ xm;
            if i & mask != mask || j < i {
                continue;
            }
            // A Pauli string maps |i⟩ → ph_i |j⟩ and |j⟩ → ph_j |i⟩.
            let ph_i = string.apply_to_basis(i as u64).1;
            let ph_j = string.apply_to_basis(j as u64).1;
            let (a, b) = (self.amps[i], self.amps[j]);
            self.amps[j] = ph_i * a;
            self.amps[i] = ph_j * b;
        }
    }

    /// Applies a Pauli string, phase included.
    pub fn apply_pauli(&mut self, string: &PauliString) -> Result<(), SimError> {
        self.same_size(string.n_qubits())?;
        self.apply_pauli_masked(string, 0);
        Ok(())
    }

    pub fn apply_gate(&mut self, g: &Gate) -> Result<(), SimError> {
        for q in g.qubits() {
            self.check_qubit(q)?;
        }
        let h = std::f64::consts::FRAC_1_SQRT_2;
        let zero = Complex64::new(0.0, 0.0);
        match *g {
            Gate::H(q) => {
                let s = Complex64::new(h, 0.0);
                self.apply_1q(q, [[s, s], [s, -s]]);
            }
            Gate::S(q) => self.phase_1q(q, ONE, I),
            Gate::Sdg(q) => self.phase_1q(q, ONE, -I),
            Gate::X(q) => self.apply_1q(q, [[zero, ONE], [ONE, zero]]),
            Gate::Y(q) => self.apply_1q(q, [[zero, -I], [I, zero]]),
            Gate::Z(q) => self.phase_1q(q, ONE, -ONE),
            Gate::Rx(q, t) => {
                let (c, s) = ((t / 2.0).cos(), (t / 2.0).sin());
                let (c, ms) = (Complex64::new(c, 0.0), Complex64::new(0.0, -s));
                self.apply_1q(q, [[c, ms], [ms, c]]);
            }
            Gate::Ry(q, t) => {
                let (c, s) = ((t / 2.0).cos(), (t / 2.0).sin());
                let (c, s) = (Complex64::new(c, 0.0), Complex64::new(s, 0.0));
                self.apply_1q(q, [[c, -s], [s, c]]);
            }
            Gate::Rz(q, t) => {
                let p = Complex64::from_polar(1.0, t / 2.0);
                self.phase_1q(q, p.conj(), p);
            }
            Gate::Cnot { control, target } => {
                let (cb, tb) = (1usize << control, 1usize << target);
                for i in 0..self.amps.len() {
                    if i & cb != 0 && i & tb == 0 {
                        self.amps.swap(i, i | tb);
                    }
                }
            }
            Gate::ControlledPauli { control, ref string } => {
                self.same_size(string.n_qubits())?;
                self.apply_pauli_masked(string, 1 << control);
            }
        }
        Ok(())
    }

    /// Applies every layer of `c` in order.
    pub fn apply(&mut self, c: &Circuit) -> Result<(), SimError> {
        self.same_size(c.n_qubits())?;
        for g in c.gates() {
            self.apply_gate(g)?;
        }
        Ok(())
    }

    /// `⟨ψ|P|ψ⟩`.
    pub fn expectation(&self, p: &PauliString) -> Result<Complex64, SimError> {
        self.same_size(p.n_qubits())?;
        let xm = p.x_words().first().copied().unwrap_or(0) as usize;
        let mut acc = Complex64::new(0.0, 0.0);
        for (i, a) in self.amps.iter().enumerate() {
            if a.norm_sqr() == 0.0 {
                continue;
            }
            let (_, ph) = p.apply_to_basis(i as u64);
            acc += self.amps[i ^ xm].conj() * ph * a;
        }
        Ok(acc)
    }

    /// Probability that every qubit in `qubits` reads `0`.
    pub fn zero_weight(&self, qubits: &[usize]) -> Result<f64, SimError> {
        let mut mask = 0usize;
        for &q in qubits {
            self.check_qubit(q)?;
            mask |= 1 << q;
        }
        Ok(self.amps.iter().enumerate().filter(|(i, _)| i & mask == 0).map(|(_, a)| a.norm_sqr()).sum())
    }

    /// `P(1)` for each qubit.
    pub fn marginals(&self) -> Vec<f64> {
        let mut out = vec![0.0; self.n_qubits];
        for (i, a) in self.amps.iter().enumerate() {
            let w = a.norm_sqr();
            for (q, o) in out.iter_mut().enumerate() {
                if i >> q & 1 == 1 {
                    *o += w;
                }
            }
        }
        out
    }

    /// `Σ_k w_k P_k |ψ⟩`.
    pub fn apply_pauli_sum(&self, terms: &[(f64, PauliString)]) -> Result<Statevector, SimError> {
        let mut out = vec![Complex64::new(0.0, 0.0); self.amps.len()];
        for (w, p) in terms {
            self.same_size(p.n_qubits())?;
            let xm = p.x_words().first().copied().unwrap_or(0) as usize;
            for (i, a) in self.amps.iter().enumerate() {
                let (_, ph) = p.apply_to_basis(i as u64);
                out[i ^ xm] += ph * a * *w;
            }
        }
        Ok(Statevector { n_qubits: self.n_qubits, amps: out })
    }

    /// `exp(−i t Σ w_k P_k) |ψ⟩` by a chunked Taylor series, exact to
    /// rounding.
    pub fn evolve_pauli_sum(&mut self, terms: &[(f64, PauliString)], t: f64) -> Result<(), SimError> {
        let bound: f64 = terms.iter().map(|(w, _)| w.abs()).sum();
        if bound == 0.0 || t == 0.0 {
            return Ok(());
        }
        let chunks = (t.abs() * bound / 2.0).ceil().max(1.0) as usize;
        let dt = t / chunks as f64;
        for _ in 0..chunks {
            let mut acc = self.clone();
            let mut v = self.clone();
            for k in 1..60 {
                v = v.apply_pauli_sum(terms)?;
                let f = Complex64::new(0.0, -dt / k as f64);
                v.amps.iter_mut().for_each(|a| *a *= f);
                acc.amps.iter_mut().zip(&v.amps).for_each(|(a, b)| *a += b);
                if v.norm() < 1e-17 {
                    break;
                }
            }
            *self = acc;
        }
        Ok(())
    }
}

/// Functional form of [`Statevector::apply`] with the cap enforced.
pub fn apply(c: &Circuit, s: &Statevector, cap: usize) -> Result<Statevector, SimError> {
    if c.n_qubits() > cap {
        return Err(SimError::CapExceeded { n_qubits: c.n_qubits(), cap });
    }
    let mut out = s.clone();
    out.apply(c)?;
    Ok(out)
}

/// Runs `c` on `|0…0⟩`.
pub fn run(c: &Circuit, cap: usize) -> Result<Statevector, SimError> {
    let mut s = Statevector::zero(c.n_qubits(), cap)?;
    s.apply(c)?;
    Ok(s)
}

/// Shot histogram. Bitstring character `k` is the outcome of `qubits[k]`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ShotResult {
    pub qubits: Vec<usize>,
    pub counts: BTreeMap<String, u64>,
    pub shots: u64,
    pub seed: u64,
}

impl ShotResult {
    /// Mean of `∏_k (−1)^{b_k}` over the shots.
    pub fn parity_mean(&self) -> f64 {
        let s: i64 = self
            .counts
            .iter()
            .map(|(b, &n)| if b.bytes().filter(|&c| c == b'1').count() % 2 == 0 { n as i64 } else { -(n as i64) })
            .sum();
        s as f64 / self.shots as f64
    }
}

/// Samples `qubits` in the computational basis. Reproducible for a given
/// seed.
pub fn sample(s: &Statevector, qubits: &[usize], shots: u64, seed: u64) -> Result<ShotResult, SimError> {
    if qubits.is_empty() {
        return Err(SimError::EmptyQubitSet);
    }
    if shots == 0 {
        return Err(SimError::ZeroShots);
    }
    for &q in qubits {
        s.check_qubit(q)?;
    }
    let mut probs = vec![0.0; 1 << qubits.len()];
    for (i, a) in s.amps.iter().enumerate() {
        let key = qubits.iter().enumerate().fold(0usize, |k, (b, &q)| k | ((i >> q & 1) << b));
        probs[key] += a.norm_sqr();
    }
    let total: f64 = probs.iter().sum();
    if (total - 1.0).abs() > 1e-9 {
        return Err(SimError::NotNormalized(total.sqrt()));
    }
    let dist = WeightedIndex::new(&probs).map_err(|_| SimError::NotNormalized(total.sqrt()))?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut hist = vec![0u64; probs.len()];
    for _ in 0..shots {
        hist[dist.sample(&mut rng)] += 1;
    }
    let counts = hist
        .into_iter()
        .enumerate()
        .filter(|&(_, n)| n > 0)
        .map(|(k, n)| ((0..qubits.len()).map(|b| if k >> b & 1 == 1 { '1' } else { '0' }).collect(), n))
        .collect();
    Ok(ShotResult { qubits: qubits.to_vec(), counts, shots, seed })
}

fn check_p(p: f64) -> Result<(), SimError> {
    if !(0.0..1.0).contains(&p) {
        return Err(SimError::BadProbability(p));
    }
    Ok(())
}

/// Global depolarizing channel on a non-identity Pauli expectation.
pub fn depolarize_expectation(ideal: f64, p: f64) -> Result<f64, SimError> {
    check_p(p)?;
    Ok((1.0 - p) * ideal)
}

/// Inverse of [`depolarize_expectation`].
pub fn mitigate_expectation(noisy: f64, p: f64) -> Result<f64, SimError> {
    check_p(p)?;
    Ok(noisy / (1.0 - p))
}

/// Depolarized expectation of `op`; the identity is left alone.
pub fn depolarize_observable(op: &PauliString, ideal: f64, p: f64) -> Result<f64, SimError> {
    if op.is_identity() {
        check_p(p)?;
        return Ok(ideal);
    }
    depolarize_expectation(ideal, p)
}

/// Errors from [`greens_function`].
#[derive(Debug, Clone, PartialEq)]
pub enum GreensError {
    Sim(SimError),
    Compile(CompileError),
    Mapping(MappingError),
}

impl fmt::Display for GreensError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            GreensError::Sim(e) => write!(f, "simulation: {e}"),
            GreensError::Compile(e) => write!(f, "compilation: {e}"),
            GreensError::Mapping(e) => write!(f, "mapping: {e}"),
        }
    }
}

impl std::error::Error for GreensError {}

impl From<SimError> for GreensError {
    fn from(e: SimError) -> Self {
        GreensError::Sim(e)
    }
}

impl From<CompileError> for GreensError {
    fn from(e: CompileError) -> Self {
        GreensError::Compile(e)
    }
}

impl From<MappingError> for GreensError {
    fn from(e: MappingError) -> Self {
        GreensError::Mapping(e)
    }
}

/// Time evolution inside the interferometer.
pub enum Evolution<'a> {
    /// Compiled circuit on the placement register for a given time.
    Compiled(&'a dyn Fn(f64) -> Result<Circuit, CompileError>),
    /// Exact `exp(−iHt)` of a Pauli sum over the layout qubits.
    Exact(&'a [(f64, PauliString)]),
}

/// How ancilla correlators are read out.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Readout {
    Exact,
    /// Each of the sixteen basis settings per time gets `shots` shots.
    Shots { shots: u64, seed: u64 },
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GreensPoint {
    pub t: f64,
    pub value: Complex64,
    /// Standard errors of the real and imaginary parts in shot mode.
    pub stderr: Option<(f64, f64)>,
}

fn lift(s: &PauliString, n: usize) -> Result<PauliString, GreensError> {
    let map: Vec<usize> = (0..s.n_qubits()).collect();
    s.remap(n, &map).map_err(|_| GreensError::Sim(SimError::SizeMismatch { expected: n, got: s.n_qubits() }))
}

/// `G_jk(t) = i⟨c†_j(t) c_k⟩` on the state prepared by `initial`, from four
/// two-ancilla interferometers over the Majorana pairs
/// `(γ_jγ_k, γ̄_jγ̄_k, γ_jγ̄_k, γ̄_jγ_k)`.
#[allow(clippy::too_many_arguments)]
pub fn greens_function(
    p: &Placement,
    initial: &Circuit,
    evolution: &Evolution<'_>,
    j: usize,
    k: usize,
    times: &[f64],
    readout: Readout,
    cap: usize,
) -> Result<Vec<GreensPoint>, GreensError> {
    use MajoranaKind::{Gamma, GammaBar};
    let n = p.total_qubits();
    let total = n + 2;
    if total > cap {
        return Err(SimError::CapExceeded { n_qubits: total, cap }.into());
    }
    let layout = &p.layout;
    let mut start = Statevector::zero(n, cap)?;
    start.apply(initial)?;
    let start = start.widened(2, cap)?;
    let (qa, qb) = (n, n + 1);
    // c†_j(t) c_k = ¼[γγ + γ̄γ̄ + iγγ̄ − iγ̄γ]; B sits at j, A at k.
    let pairs = [
        (Gamma, Gamma, Complex64::new(1.0, 0.0)),
        (GammaBar, GammaBar, Complex64::new(1.0, 0.0)),
        (Gamma, GammaBar, I),
        (GammaBar, Gamma, -I),
    ];
    // ⟨(X_a + iY_a)(X_b + iY_b)⟩ = XX − YY + i(XY + YX).
    let bases = [
        (Letter::X, Letter::X, Complex64::new(1.0, 0.0)),
        (Letter::Y, Letter::Y, Complex64::new(-1.0, 0.0)),
        (Letter::X, Letter::Y, I),
        (Letter::Y, Letter::X, I),
    ];
    let exact_terms = match evolution {
        Evolution::Exact(terms) => {
            terms.iter().map(|(w, s)| Ok((*w, lift(s, total)?))).collect::<Result<Vec<_>, GreensError>>()?
        }
        Evolution::Compiled(_) => Vec::new(),
    };
    let mut value = vec![Complex64::new(0.0, 0.0); times.len()];
    let mut var = vec![(0.0, 0.0); times.len()];
    for (pi, &(kind_b, kind_a, w)) in pairs.iter().enumerate() {
        let b = single_majorana(layout, j, kind_b)?;
        let a = single_majorana(layout, k, kind_a)?;
        // Exact mode evolves one state forward through the time list.
        let mut evolved = start.clone();
        let mut now = 0.0;
        if let Evolution::Exact(_) = evolution {
            evolved.apply_gate(&Gate::H(qa))?;
            evolved.apply_gate(&Gate::H(qb))?;
            evolved.apply_gate(&Gate::ControlledPauli { control: qa, string: lift(&a, total)? })?;
        }
        for (ti, &t) in times.iter().enumerate() {
            let state = match evolution {
                Evolution::Compiled(f) => {
                    let ht = hadamard_test_circuit(p, &a, &b, &f(t)?)?;
                    let mut s = start.clone();
                    s.apply(&ht.circuit)?;
                    s
                }
                Evolution::Exact(_) => {
                    evolved.evolve_pauli_sum(&exact_terms, t - now)?;
                    now = t;
                    let mut s = evolved.clone();
                    s.apply_gate(&Gate::ControlledPauli { control: qb, string: lift(&b, total)? })?;
                    s
                }
            };
            for (bi, &(la, lb, c)) in bases.iter().enumerate() {
                let coeff = Complex64::new(0.0, 0.25) * w * c;
                match readout {
                    Readout::Exact => {
                        let op = PauliString::from_letters(total, &[(qa, la), (qb, lb)]);
                        value[ti] += coeff * state.expectation(&op)?.re;
                    }
                    Readout::Shots { shots, seed } => {
                        let mut s = state.clone();
                        for (q, l) in [(qa, la), (qb, lb)] {
                            if l == Letter::Y {
                                s.apply_gate(&Gate::Sdg(q))?;
                            }
                            s.apply_gate(&Gate::H(q))?;
                        }
                        let run_seed = seed.wrapping_add((ti * 16 + pi * 4 + bi) as u64);
                        let m = sample(&s, &[qa, qb], shots, run_seed)?.parity_mean();
                        let v = (1.0 - m * m).max(0.0) / shots as f64;
                        value[ti] += coeff * m;
                        var[ti].0 += coeff.re * coeff.re * v;
                        var[ti].1 += coeff.im * coeff.im * v;
                    }
                }
            }
        }
    }
    let shots = matches!(readout, Readout::Shots { .. });
    let out = times
        .iter()
        .zip(value)
        .zip(var)
        .map(|((&t, value), (vr, vi))| GreensPoint { t, value, stderr: shots.then(|| (vr.sqrt(), vi.sqrt())) })
        .collect();
    Ok(out)
}
