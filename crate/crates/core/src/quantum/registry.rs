use std::collections::BTreeMap;

use num_complex::Complex64;
use rand::Rng;

use super::labels::{BellLabel, PauliLabel};
use super::state::{QubitId, StateVector};
use super::unitary::Unitary2;
use super::QuantumError;

/// Many qubits held as a set of mutually unentangled clusters.
///
/// Each cluster is an exact [`StateVector`]; clusters are merged only when an
/// operation spans two of them, and shrink when qubits are measured, so a
/// protocol run with hundreds of qubits never builds a large register.
#[derive(Debug, Default, Clone)]
pub struct QuantumRegistry {
    next_qubit: u32,
    next_cluster: u32,
    clusters: BTreeMap<u32, StateVector>,
    owner: BTreeMap<QubitId, u32>,
}

impl QuantumRegistry {
    pub fn new() -> Self {
        Self::default()
    }

    fn fresh_ids(&mut self, n: usize) -> Vec<QubitId> {
        (0..n)
            .map(|_| {
                let q = QubitId(self.next_qubit);
                self.next_qubit += 1;
                q
            })
            .collect()
    }

    fn insert(&mut self, s: StateVector) {
        if s.num_qubits() == 0 {
            return;
        }
        let id = self.next_cluster;
        self.next_cluster += 1;
        for &q in s.qubits() {
            self.owner.insert(q, id);
        }
        self.clusters.insert(id, s);
    }

    pub fn prepare_bell(&mut self, label: BellLabel) -> (QubitId, QubitId) {
        let ids = self.fresh_ids(2);
        let s = StateVector::bell(label, ids[0], ids[1]).expect("fresh ids are distinct");
        self.insert(s);
        (ids[0], ids[1])
    }

    pub fn prepare_qubit(
        &mut self,
        alpha: Complex64,
        beta: Complex64,
    ) -> Result<QubitId, QuantumError> {
        let q = QubitId(self.next_qubit);
        let s = StateVector::single(q, alpha, beta)?;
        self.next_qubit += 1;
        self.insert(s);
        Ok(q)
    }

    pub fn contains(&self, q: QubitId) -> bool {
        self.owner.contains_key(&q)
    }

    pub fn live_qubits(&self) -> usize {
        self.owner.len()
    }

    pub fn largest_cluster(&self) -> usize {
        self.clusters
            .values()
            .map(|s| s.num_qubits())
            .max()
            .unwrap_or(0)
    }

    fn cluster_of(&self, q: QubitId) -> Result<u32, QuantumError> {
        self.owner
            .get(&q)
            .copied()
            .ok_or(QuantumError::UnknownQubit(q))
    }

    /// The cluster containing `q`.
    pub fn state_of(&self, q: QubitId) -> Result<&StateVector, QuantumError> {
        let c = self.cluster_of(q)?;
        Ok(&self.clusters[&c])
    }

    fn take(&mut self, c: u32) -> StateVector {
        let s = self.clusters.remove(&c).expect("cluster id is live");
        for q in s.qubits() {
            self.owner.remove(q);
        }
        s
    }

    /// Merges the clusters holding `qs` into one and returns its id.
    fn merge(&mut self, qs: &[QubitId]) -> Result<u32, QuantumError> {
        let mut ids = Vec::new();
        for &q in qs {
            let c = self.cluster_of(q)?;
            if !ids.contains(&c) {
                ids.push(c);
            }
        }
        if ids.len() == 1 {
            return Ok(ids[0]);
        }
        let mut joint = self.take(ids[0]);
        for &c in &ids[1..] {
            let s = self.take(c);
            joint = joint.tensor(&s)?;
        }
        let id = self.next_cluster;
        self.insert(joint);
        Ok(id)
    }

    fn replace(&mut self, c: u32, s: StateVector) {
        self.take(c);
        self.insert(s);
    }

    pub fn apply_pauli(&mut self, q: QubitId, p: PauliLabel) -> Result<(), QuantumError> {
        let c = self.cluster_of(q)?;
        let s = self.clusters[&c].apply_pauli(q, p)?;
        self.clusters.insert(c, s);
        Ok(())
    }

    pub fn apply_unitary(&mut self, q: QubitId, u: &Unitary2) -> Result<(), QuantumError> {
        let c = self.cluster_of(q)?;
        let s = self.clusters[&c].apply_unitary1q(q, u)?;
        self.clusters.insert(c, s);
        Ok(())
    }

    pub fn apply_cnot(&mut self, control: QubitId, target: QubitId) -> Result<(), QuantumError> {
        if control == target {
            return Err(QuantumError::InvalidRegister(format!(
                "control and target are both {control}"
            )));
        }
        let c = self.merge(&[control, target])?;
        let s = self.clusters[&c].apply_cnot(control, target)?;
        self.clusters.insert(c, s);
        Ok(())
    }

    pub fn bell_measure<R: Rng + ?Sized>(
        &mut self,
        a: QubitId,
        b: QubitId,
        rng: &mut R,
    ) -> Result<BellLabel, QuantumError> {
        if a == b {
            return Err(QuantumError::InvalidRegister(format!(
                "duplicate qubit {a}"
            )));
        }
        let c = self.merge(&[a, b])?;
        let (label, post) = self.clusters[&c].bell_measure(a, b, rng)?;
        self.replace(c, post);
        Ok(label)
    }

    pub fn comp_measure<R: Rng + ?Sized>(
        &mut self,
        q: QubitId,
        rng: &mut R,
    ) -> Result<bool, QuantumError> {
        let c = self.cluster_of(q)?;
        let (bit, post) = self.clusters[&c].comp_measure(q, rng)?;
        self.replace(c, post);
        Ok(bit)
    }

    /// Joint state of `qs` when they are not entangled with anything else,
    /// registered in the given order. Merges their clusters.
    pub fn joint_state(&mut self, qs: &[QubitId]) -> Result<StateVector, QuantumError> {
        let c = self.merge(qs)?;
        let s = &self.clusters[&c];
        if s.num_qubits() != qs.len() {
            return Err(QuantumError::RegisterMismatch);
        }
        s.permuted(qs)
    }
}
