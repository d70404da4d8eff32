use std::fmt;

use num_complex::Complex64;
use rand::Rng;
use serde::{Deserialize, Serialize};

use super::labels::{BellLabel, PauliLabel};
use super::unitary::Unitary2;
use super::{QuantumError, AMPLITUDE_TOL, MAX_REGISTER_QUBITS, NORM_TOL};

/// Opaque qubit handle.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct QubitId(pub u32);

impl fmt::Display for QubitId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "q{}", self.0)
    }
}

/// Pure state over an ordered qubit register.
///
/// Basis index bits follow register order with the first qubit as the most
/// significant bit, so `[a, b]` with amplitude index `2*a_bit + b_bit`.
/// Operations never mutate in place; each returns a new state.
#[derive(Debug, Clone, PartialEq)]
pub struct StateVector {
    qubits: Vec<QubitId>,
    amps: Vec<Complex64>,
}

fn ensure_unique(qubits: &[QubitId]) -> Result<(), QuantumError> {
    for (i, q) in qubits.iter().enumerate() {
        if qubits[..i].contains(q) {
            return Err(QuantumError::InvalidRegister(format!(
                "duplicate qubit {q}"
            )));
        }
    }
    Ok(())
}

/// Drops the bits at `positions` (given as shifts, sorted descending) from `i`.
fn squeeze(mut i: usize, shifts_desc: &[usize]) -> usize {
    for &s in shifts_desc {
        let low = i & ((1 << s) - 1);
        i = ((i >> (s + 1)) << s) | low;
    }
    i
}

impl StateVector {
    pub fn new(qubits: Vec<QubitId>, amps: Vec<Complex64>) -> Result<Self, QuantumError> {
        ensure_unique(&qubits)?;
        if qubits.len() > MAX_REGISTER_QUBITS {
            return Err(QuantumError::RegisterTooLarge(qubits.len()));
        }
        if amps.len() != 1usize << qubits.len() {
            return Err(QuantumError::InvalidRegister(format!(
                "{} amplitudes for {} qubits",
                amps.len(),
                qubits.len()
            )));
        }
        let s = Self { qubits, amps };
        let n = s.norm_sqr();
        if (n - 1.0).abs() > NORM_TOL {
            return Err(QuantumError::NotNormalized(n));
        }
        Ok(s)
    }

    /// The zero-qubit register (a scalar of unit modulus).
    pub fn empty() -> Self {
        Self {
            qubits: Vec::new(),
            amps: vec![Complex64::new(1.0, 0.0)],
        }
    }

    pub fn basis(q: QubitId, bit: bool) -> Self {
        let mut amps = vec![Complex64::new(0.0, 0.0); 2];
        amps[bit as usize] = Complex64::new(1.0, 0.0);
        Self {
            qubits: vec![q],
            amps,
        }
    }

    /// `alpha|0> + beta|1>`; must be normalized.
    pub fn single(q: QubitId, alpha: Complex64, beta: Complex64) -> Result<Self, QuantumError> {
        Self::new(vec![q], vec![alpha, beta])
    }

    pub fn bell(label: BellLabel, a: QubitId, b: QubitId) -> Result<Self, QuantumError> {
        if a == b {
            return Err(QuantumError::InvalidRegister(format!(
                "duplicate qubit {a}"
            )));
        }
        Ok(Self {
            qubits: vec![a, b],
            amps: label.amplitudes().to_vec(),
        })
    }

    pub fn qubits(&self) -> &[QubitId] {
        &self.qubits
    }

    pub fn amplitudes(&self) -> &[Complex64] {
        &self.amps
    }

    pub fn num_qubits(&self) -> usize {
        self.qubits.len()
    }

    pub fn contains(&self, q: QubitId) -> bool {
        self.qubits.contains(&q)
    }

    pub fn norm_sqr(&self) -> f64 {
        self.amps.iter().map(|a| a.norm_sqr()).sum()
    }

    fn position(&self, q: QubitId) -> Result<usize, QuantumError> {
        self.qubits
            .iter()
            .position(|&x| x == q)
            .ok_or(QuantumError::UnknownQubit(q))
    }

    fn shift_of(&self, pos: usize) -> usize {
        self.qubits.len() - 1 - pos
    }

    pub fn tensor(&self, other: &StateVector) -> Result<StateVector, QuantumError> {
        if let Some(q) = other.qubits.iter().find(|q| self.qubits.contains(q)) {
            return Err(QuantumError::InvalidRegister(format!(
                "qubit {q} on both sides"
            )));
        }
        let total = self.qubits.len() + other.qubits.len();
        if total > MAX_REGISTER_QUBITS {
            return Err(QuantumError::RegisterTooLarge(total));
        }
        let mut qubits = self.qubits.clone();
        qubits.extend_from_slice(&other.qubits);
        let amps = self
            .amps
            .iter()
            .flat_map(|a| other.amps.iter().map(move |b| a * b))
            .collect();
        Ok(StateVector { qubits, amps })
    }

    pub fn apply_pauli(&self, q: QubitId, p: PauliLabel) -> Result<StateVector, QuantumError> {
        let pos = self.position(q)?;
        Ok(self.apply_matrix(pos, &p.matrix()))
    }

    pub fn apply_unitary1q(&self, q: QubitId, u: &Unitary2) -> Result<StateVector, QuantumError> {
        let pos = self.position(q)?;
        Ok(self.apply_matrix(pos, u.matrix()))
    }

    fn apply_matrix(&self, pos: usize, m: &[[Complex64; 2]; 2]) -> StateVector {
        let mask = 1usize << self.shift_of(pos);
        let mut amps = self.amps.clone();
        for i in 0..self.amps.len() {
            if i & mask == 0 {
                let j = i | mask;
                let (a0, a1) = (self.amps[i], self.amps[j]);
                amps[i] = m[0][0] * a0 + m[0][1] * a1;
                amps[j] = m[1][0] * a0 + m[1][1] * a1;
            }
        }
        StateVector {
            qubits: self.qubits.clone(),
            amps,
        }
    }

    pub fn apply_cnot(
        &self,
        control: QubitId,
        target: QubitId,
    ) -> Result<StateVector, QuantumError> {
        if control == target {
            return Err(QuantumError::InvalidRegister(format!(
                "control and target are both {control}"
            )));
        }
        let cmask = 1usize << self.shift_of(self.position(control)?);
        let tmask = 1usize << self.shift_of(self.position(target)?);
        let mut amps = self.amps.clone();
        for (i, a) in amps.iter_mut().enumerate() {
            if i & cmask != 0 {
                *a = self.amps[i ^ tmask];
            }
        }
        Ok(StateVector {
            qubits: self.qubits.clone(),
            amps,
        })
    }

    /// Same state with the register listed in `order` (a permutation of the
    /// current qubits).
    pub fn permuted(&self, order: &[QubitId]) -> Result<StateVector, QuantumError> {
        if order.len() != self.qubits.len() {
            return Err(QuantumError::RegisterMismatch);
        }
        ensure_unique(order)?;
        let src: Vec<usize> = order
            .iter()
            .map(|&q| self.position(q).map_err(|_| QuantumError::RegisterMismatch))
            .collect::<Result<_, _>>()?;
        let n = order.len();
        let mut amps = vec![Complex64::new(0.0, 0.0); self.amps.len()];
        for (j, slot) in amps.iter_mut().enumerate() {
            let mut i = 0usize;
            for (k, &p) in src.iter().enumerate() {
                let bit = (j >> (n - 1 - k)) & 1;
                i |= bit << (n - 1 - p);
            }
            *slot = self.amps[i];
        }
        Ok(StateVector {
            qubits: order.to_vec(),
            amps,
        })
    }

    /// Unnormalized residual after projecting `(a, b)` onto `label`.
    fn project_bell(
        &self,
        a: QubitId,
        b: QubitId,
        label: BellLabel,
    ) -> Result<Vec<Complex64>, QuantumError> {
        if a == b {
            return Err(QuantumError::InvalidRegister(format!(
                "duplicate qubit {a}"
            )));
        }
        let sa = self.shift_of(self.position(a)?);
        let sb = self.shift_of(self.position(b)?);
        let mut shifts = [sa, sb];
        shifts.sort_unstable_by(|x, y| y.cmp(x));
        let bell = label.amplitudes();
        let mut out = vec![Complex64::new(0.0, 0.0); self.amps.len() >> 2];
        for (i, amp) in self.amps.iter().enumerate() {
            let x = (((i >> sa) & 1) << 1) | ((i >> sb) & 1);
            if bell[x].norm_sqr() == 0.0 {
                continue;
            }
            out[squeeze(i, &shifts)] += bell[x].conj() * amp;
        }
        Ok(out)
    }

    fn without(&self, removed: &[QubitId], amps: Vec<Complex64>) -> StateVector {
        let qubits: Vec<QubitId> = self
            .qubits
            .iter()
            .copied()
            .filter(|q| !removed.contains(q))
            .collect();
        let norm = amps.iter().map(|a| a.norm_sqr()).sum::<f64>().sqrt();
        StateVector {
            qubits,
            amps: amps.into_iter().map(|a| a / norm).collect(),
        }
    }

    /// Born probabilities of each Bell outcome on `(a, b)`, indexed like
    /// [`BellLabel::ALL`].
    pub fn bell_probabilities(&self, a: QubitId, b: QubitId) -> Result<[f64; 4], QuantumError> {
        let mut p = [0.0; 4];
        for l in BellLabel::ALL {
            p[l.index()] = self
                .project_bell(a, b, l)?
                .iter()
                .map(|c| c.norm_sqr())
                .sum();
        }
        Ok(p)
    }

    /// Post-measurement state for a given Bell outcome, or `None` when the
    /// outcome has zero probability.
    pub fn collapse_bell(
        &self,
        a: QubitId,
        b: QubitId,
        label: BellLabel,
    ) -> Result<Option<StateVector>, QuantumError> {
        let r = self.project_bell(a, b, label)?;
        let p: f64 = r.iter().map(|c| c.norm_sqr()).sum();
        if p <= AMPLITUDE_TOL * AMPLITUDE_TOL {
            return Ok(None);
        }
        Ok(Some(self.without(&[a, b], r)))
    }

    /// Joint Bell measurement on `(a, b)`. The measured pair is consumed.
    pub fn bell_measure<R: Rng + ?Sized>(
        &self,
        a: QubitId,
        b: QubitId,
        rng: &mut R,
    ) -> Result<(BellLabel, StateVector), QuantumError> {
        let probs = self.bell_probabilities(a, b)?;
        let label = BellLabel::ALL[sample(&probs, rng)];
        let post = self
            .collapse_bell(a, b, label)?
            .expect("sampled outcome has positive probability");
        Ok((label, post))
    }

    pub fn prob_one(&self, q: QubitId) -> Result<f64, QuantumError> {
        let mask = 1usize << self.shift_of(self.position(q)?);
        Ok(self
            .amps
            .iter()
            .enumerate()
            .filter(|(i, _)| i & mask != 0)
            .map(|(_, a)| a.norm_sqr())
            .sum())
    }

    pub fn collapse_comp(
        &self,
        q: QubitId,
        bit: bool,
    ) -> Result<Option<StateVector>, QuantumError> {
        let shift = self.shift_of(self.position(q)?);
        let mask = 1usize << shift;
        let want = if bit { mask } else { 0 };
        let r: Vec<Complex64> = self
            .amps
            .iter()
            .enumerate()
            .filter(|(i, _)| i & mask == want)
            .map(|(_, a)| *a)
            .collect();
        let p: f64 = r.iter().map(|c| c.norm_sqr()).sum();
        if p <= AMPLITUDE_TOL * AMPLITUDE_TOL {
            return Ok(None);
        }
        Ok(Some(self.without(&[q], r)))
    }

    /// Computational-basis measurement of `q`. The qubit is consumed.
    pub fn comp_measure<R: Rng + ?Sized>(
        &self,
        q: QubitId,
        rng: &mut R,
    ) -> Result<(bool, StateVector), QuantumError> {
        let p1 = self.prob_one(q)?;
        let bit = sample(&[1.0 - p1, p1], rng) == 1;
        let post = self
            .collapse_comp(q, bit)?
            .expect("sampled outcome has positive probability");
        Ok((bit, post))
    }

    pub fn inner(&self, other: &StateVector) -> Result<Complex64, QuantumError> {
        let other = if other.qubits == self.qubits {
            other.clone()
        } else {
            other.permuted(&self.qubits)?
        };
        Ok(other
            .amps
            .iter()
            .zip(&self.amps)
            .map(|(t, s)| t.conj() * s)
            .sum())
    }

    /// `|<target|self>|^2`, clamped to `[0, 1]`.
    pub fn fidelity(&self, target: &StateVector) -> Result<f64, QuantumError> {
        Ok(self.inner(target)?.norm_sqr().clamp(0.0, 1.0))
    }

    /// Whether this 2-qubit state equals `label` up to a global phase.
    pub fn is_bell(&self, label: BellLabel) -> bool {
        if self.qubits.len() != 2 {
            return false;
        }
        let target = StateVector {
            qubits: self.qubits.clone(),
            amps: label.amplitudes().to_vec(),
        };
        self.fidelity(&target)
            .map(|f| f > 1.0 - AMPLITUDE_TOL)
            .unwrap_or(false)
    }

    pub fn identify_bell(&self) -> Option<BellLabel> {
        BellLabel::ALL.into_iter().find(|&l| self.is_bell(l))
    }

    /// Equality up to a global phase, within the amplitude tolerance.
    pub fn equals_up_to_phase(&self, other: &StateVector) -> bool {
        self.fidelity(other)
            .map(|f| f > 1.0 - AMPLITUDE_TOL)
            .unwrap_or(false)
    }
}

/// Inverse-CDF draw over a probability vector (renormalized).
pub(crate) fn sample<R: Rng + ?Sized>(probs: &[f64], rng: &mut R) -> usize {
    let total: f64 = probs.iter().sum();
    let u: f64 = rng.random::<f64>() * total;
    let mut acc = 0.0;
    let mut last = 0;
    for (i, &p) in probs.iter().enumerate() {
        if p <= 0.0 {
            continue;
        }
        last = i;
        acc += p;
        if u < acc {
            return i;
        }
    }
    last
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    const Q: [QubitId; 6] = [
        QubitId(1),
        QubitId(2),
        QubitId(3),
        QubitId(4),
        QubitId(5),
        QubitId(6),
    ];
    const S: f64 = std::f64::consts::FRAC_1_SQRT_2;

    fn c(re: f64) -> Complex64 {
        Complex64::new(re, 0.0)
    }

    fn close(a: &[Complex64], b: &[f64]) -> bool {
        a.len() == b.len() && a.iter().zip(b).all(|(x, y)| (x - c(*y)).norm() < 1e-12)
    }

    #[test]
    fn bell_amplitudes() {
        let s = StateVector::bell(BellLabel::PsiPlus, Q[0], Q[1]).unwrap();
        assert!(close(s.amplitudes(), &[S, 0.0, 0.0, S]));
        let s = StateVector::bell(BellLabel::PhiMinus, Q[0], Q[1]).unwrap();
        assert!(close(s.amplitudes(), &[0.0, S, -S, 0.0]));
        let s = StateVector::bell(BellLabel::PsiMinus, Q[0], Q[1]).unwrap();
        assert!(close(s.amplitudes(), &[S, 0.0, 0.0, -S]));
        assert!(StateVector::bell(BellLabel::PsiPlus, Q[0], Q[0]).is_err());
    }

    #[test]
    fn tensor_products() {
        let s = StateVector::basis(Q[0], false)
            .tensor(&StateVector::basis(Q[1], true))
            .unwrap();
        assert!(close(s.amplitudes(), &[0.0, 1.0, 0.0, 0.0]));
        let a = StateVector::bell(BellLabel::PsiPlus, Q[0], Q[1]).unwrap();
        let b = StateVector::bell(BellLabel::PsiPlus, Q[2], Q[3]).unwrap();
        let ab = a.tensor(&b).unwrap();
        let mut expect = [0.0; 16];
        for i in [0b0000, 0b0011, 0b1100, 0b1111] {
            expect[i] = 0.5;
        }
        assert!(close(ab.amplitudes(), &expect));
        assert!(a.tensor(&a).is_err());
    }

    #[test]
    fn pauli_on_bell() {
        let psi = StateVector::bell(BellLabel::PsiPlus, Q[0], Q[1]).unwrap();
        let x = psi.apply_pauli(Q[0], PauliLabel::X).unwrap();
        assert!(close(
            x.amplitudes(),
            &BellLabel::PhiPlus.amplitudes().map(|a| a.re)
        ));
        let y = psi.apply_pauli(Q[0], PauliLabel::IY).unwrap();
        // exact, coefficient +1
        assert!(close(
            y.amplitudes(),
            &BellLabel::PhiMinus.amplitudes().map(|a| a.re)
        ));
        let z = psi.apply_pauli(Q[0], PauliLabel::Z).unwrap();
        assert!(z.is_bell(BellLabel::PsiMinus));
        assert!(matches!(
            psi.apply_pauli(Q[5], PauliLabel::Z),
            Err(QuantumError::UnknownQubit(_))
        ));
    }

    #[test]
    fn cnot_basics() {
        let s = StateVector::basis(Q[0], true)
            .tensor(&StateVector::basis(Q[1], false))
            .unwrap();
        let t = s.apply_cnot(Q[0], Q[1]).unwrap();
        assert!(close(t.amplitudes(), &[0.0, 0.0, 0.0, 1.0]));
        assert!(s.apply_cnot(Q[0], Q[0]).is_err());
        assert!(s.apply_cnot(Q[0], Q[4]).is_err());
    }

    #[test]
    fn cnot_ancilla_onto_travel_qubit() {
        // h = Q0, t = Q1, e = Q2; alpha = 0.6, beta = 0.8
        let (al, be) = (0.6, 0.8);
        let s = StateVector::bell(BellLabel::PsiPlus, Q[0], Q[1])
            .unwrap()
            .tensor(&StateVector::single(Q[2], c(al), c(be)).unwrap())
            .unwrap();
        let out = s.apply_cnot(Q[2], Q[1]).unwrap();
        // Hand expansion over |h t e>:
        // alpha/sqrt2 (|000> + |110>) + beta/sqrt2 (|011> + |101>)
        let mut expect = [0.0; 8];
        expect[0b000] = al * S;
        expect[0b110] = al * S;
        expect[0b011] = be * S;
        expect[0b101] = be * S;
        assert!(close(out.amplitudes(), &expect));
    }

    #[test]
    fn measurement_consumes_qubits() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        let s = StateVector::bell(BellLabel::PhiMinus, Q[0], Q[1]).unwrap();
        let (l, post) = s.bell_measure(Q[0], Q[1], &mut rng).unwrap();
        assert_eq!(l, BellLabel::PhiMinus);
        assert_eq!(post.num_qubits(), 0);

        let s = StateVector::bell(BellLabel::PhiPlus, Q[0], Q[1]).unwrap();
        let (b, post) = s.comp_measure(Q[0], &mut rng).unwrap();
        assert_eq!(post.qubits(), &[Q[1]]);
        assert!((post.prob_one(Q[1]).unwrap() - if b { 0.0 } else { 1.0 }).abs() < 1e-12);

        let one = StateVector::basis(Q[3], true);
        for _ in 0..20 {
            assert!(one.comp_measure(Q[3], &mut rng).unwrap().0);
        }
    }

    #[test]
    fn permutation_roundtrip() {
        let s = StateVector::bell(BellLabel::PhiMinus, Q[0], Q[1])
            .unwrap()
            .tensor(&StateVector::single(Q[2], c(0.6), c(0.8)).unwrap())
            .unwrap();
        let p = s.permuted(&[Q[2], Q[0], Q[1]]).unwrap();
        assert!((p.fidelity(&s).unwrap() - 1.0).abs() < 1e-12);
        let back = p.permuted(s.qubits()).unwrap();
        assert_eq!(back, s);
    }

    #[test]
    fn unnormalized_rejected() {
        assert!(matches!(
            StateVector::single(Q[0], c(1.0), c(1.0)),
            Err(QuantumError::NotNormalized(_))
        ));
        assert!(StateVector::new(vec![Q[0]], vec![c(1.0)]).is_err());
    }
}
