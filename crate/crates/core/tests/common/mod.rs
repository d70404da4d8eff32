//! Independent real-amplitude arithmetic for the test oracles. Nothing here
//! calls into the simulator.

#![allow(dead_code)]

pub mod attacks;

use std::f64::consts::FRAC_1_SQRT_2 as H;

use osbmdi::quantum::{BellLabel, PauliLabel};

pub const LABELS: [BellLabel; 4] = [
    BellLabel::PsiPlus,
    BellLabel::PsiMinus,
    BellLabel::PhiPlus,
    BellLabel::PhiMinus,
];
pub const PAULIS: [PauliLabel; 4] = [PauliLabel::I, PauliLabel::X, PauliLabel::IY, PauliLabel::Z];

/// Bob's label with its four `(13)(24)` terms when Alice holds psi+.
pub type ExpansionLine = (BellLabel, [(BellLabel, BellLabel, f64); 4]);

/// Amplitudes on `|00>, |01>, |10>, |11>`.
pub fn bell(l: BellLabel) -> [f64; 4] {
    match l {
        BellLabel::PsiPlus => [H, 0.0, 0.0, H],
        BellLabel::PsiMinus => [H, 0.0, 0.0, -H],
        BellLabel::PhiPlus => [0.0, H, H, 0.0],
        BellLabel::PhiMinus => [0.0, H, -H, 0.0],
    }
}

pub fn pauli(p: PauliLabel) -> [[f64; 2]; 2] {
    match p {
        PauliLabel::I => [[1.0, 0.0], [0.0, 1.0]],
        PauliLabel::X => [[0.0, 1.0], [1.0, 0.0]],
        PauliLabel::IY => [[0.0, 1.0], [-1.0, 0.0]],
        PauliLabel::Z => [[1.0, 0.0], [0.0, -1.0]],
    }
}

/// An `n`-qubit real state; qubit 0 is the most significant bit.
#[derive(Debug, Clone)]
pub struct Real {
    pub n: usize,
    pub amps: Vec<f64>,
}

impl Real {
    pub fn from_pairs(pairs: &[[f64; 4]]) -> Self {
        let mut amps = vec![1.0];
        for p in pairs {
            amps = amps
                .iter()
                .flat_map(|a| p.iter().map(move |b| a * b))
                .collect();
        }
        Real {
            n: 2 * pairs.len(),
            amps,
        }
    }

    pub fn tensor_qubit(&self, a0: f64, a1: f64) -> Self {
        let amps = self.amps.iter().flat_map(|a| [a * a0, a * a1]).collect();
        Real {
            n: self.n + 1,
            amps,
        }
    }

    pub fn bit(&self, idx: usize, q: usize) -> usize {
        (idx >> (self.n - 1 - q)) & 1
    }

    pub fn apply(&self, q: usize, m: [[f64; 2]; 2]) -> Self {
        let mut out = vec![0.0; self.amps.len()];
        let mask = 1 << (self.n - 1 - q);
        for (i, a) in self.amps.iter().enumerate() {
            let b = self.bit(i, q);
            for (r, row) in m.iter().enumerate() {
                let j = if r == b { i } else { i ^ mask };
                out[j] += row[b] * a;
            }
        }
        Real {
            n: self.n,
            amps: out,
        }
    }

    pub fn cnot(&self, control: usize, target: usize) -> Self {
        let mask = 1 << (self.n - 1 - target);
        let mut out = vec![0.0; self.amps.len()];
        for (i, a) in self.amps.iter().enumerate() {
            let j = if self.bit(i, control) == 1 {
                i ^ mask
            } else {
                i
            };
            out[j] += a;
        }
        Real {
            n: self.n,
            amps: out,
        }
    }

    /// Probability of the given Bell outcomes on disjoint pairs together
    /// with the given computational-basis outcomes.
    pub fn prob(&self, bells: &[(usize, usize, BellLabel)], comps: &[(usize, usize)]) -> f64 {
        let fixed: Vec<usize> = bells
            .iter()
            .flat_map(|&(a, b, _)| [a, b])
            .chain(comps.iter().map(|c| c.0))
            .collect();
        let rest: Vec<usize> = (0..self.n).filter(|q| !fixed.contains(q)).collect();
        let mut total = 0.0;
        for r in 0..1usize << rest.len() {
            // amplitude of <bells, comps, rest = r | psi>
            let mut amp = 0.0;
            for pat in 0..1usize << (2 * bells.len()) {
                let mut idx = 0usize;
                let mut w = 1.0;
                for (k, &(a, b, l)) in bells.iter().enumerate() {
                    let xy = (pat >> (2 * k)) & 3;
                    w *= bell(l)[xy];
                    idx |= (xy >> 1) << (self.n - 1 - a);
                    idx |= (xy & 1) << (self.n - 1 - b);
                }
                if w == 0.0 {
                    continue;
                }
                for &(q, v) in comps {
                    idx |= v << (self.n - 1 - q);
                }
                for (k, &q) in rest.iter().enumerate() {
                    idx |= ((r >> k) & 1) << (self.n - 1 - q);
                }
                amp += w * self.amps[idx];
            }
            total += amp * amp;
        }
        total
    }
}

/// Coefficients of a 4-qubit state on `|l1>_{13} |l2>_{24}` (qubits 0..4
/// standing for 1..4).
pub fn expand_13_24(s: &Real) -> [[f64; 4]; 4] {
    let mut c = [[0.0; 4]; 4];
    for (i, l1) in LABELS.iter().enumerate() {
        for (j, l2) in LABELS.iter().enumerate() {
            let (b1, b2) = (bell(*l1), bell(*l2));
            let mut acc = 0.0;
            for x in 0..16usize {
                let (x1, x2, x3, x4) = ((x >> 3) & 1, (x >> 2) & 1, (x >> 1) & 1, x & 1);
                acc += s.amps[x] * b1[2 * x1 + x3] * b2[2 * x2 + x4];
            }
            c[i][j] = acc;
        }
    }
    c
}

/// The label a two-qubit state equals up to sign, if any.
pub fn identify(v: [f64; 4]) -> Option<BellLabel> {
    LABELS.into_iter().find(|l| {
        (bell(*l)
            .iter()
            .zip(v)
            .map(|(a, b)| a * b)
            .sum::<f64>()
            .abs()
            - 1.0)
            .abs()
            < 1e-12
    })
}

/// State of `(1,3)` after Charlie finds `bmo1` on `(2,4)`, normalized.
pub fn swap_home(alice: BellLabel, bob: BellLabel, bmo1: BellLabel) -> [f64; 4] {
    let s = Real::from_pairs(&[bell(alice), bell(bob)]);
    let m = bell(bmo1);
    let mut v = [0.0; 4];
    for x in 0..16usize {
        let (x1, x2, x3, x4) = ((x >> 3) & 1, (x >> 2) & 1, (x >> 1) & 1, x & 1);
        v[2 * x1 + x3] += s.amps[x] * m[2 * x2 + x4];
    }
    let n = v.iter().map(|a| a * a).sum::<f64>().sqrt();
    v.map(|a| a / n)
}

/// Applies `p` to the first and `q` to the second qubit of a pair.
pub fn on_pair(v: [f64; 4], p: PauliLabel, q: PauliLabel) -> [f64; 4] {
    let (a, b) = (pauli(p), pauli(q));
    let mut out = [0.0; 4];
    for x in 0..4 {
        for y in 0..4 {
            out[x] += a[x >> 1][y >> 1] * b[x & 1][y & 1] * v[y];
        }
    }
    out
}

/// Half-width multiple used by every statistical oracle comparison.
pub const SIGMAS: f64 = 4.0;

pub fn within_sigmas(failures: u64, checks: u64, p: f64) -> bool {
    let rate = failures as f64 / checks as f64;
    let q = p.clamp(0.0, 1.0);
    let se = (q * (1.0 - q) / checks as f64).sqrt();
    // slack for oracle values of exactly 0 or 1 computed in floating point
    (rate - p).abs() <= SIGMAS * se + 1e-12
}
