use num_complex::Complex64;
use rand::seq::{index, SliceRandom};
use rand::Rng;

use super::{EveState, Provenance};
use crate::protocol::{Actor, Leg, Network, ProtocolError};
use crate::quantum::{BellLabel, PauliLabel, QubitId};

use super::spec::DisturbMode;

/// Eve acts on an in-flight qubit by taking it off the channel for the
/// duration of `f`.
fn with_qubit<T>(
    net: &mut Network,
    q: QubitId,
    f: impl FnOnce(&mut Network) -> Result<T, ProtocolError>,
) -> Result<T, ProtocolError> {
    net.transfer(q, Actor::Channel, Actor::Eve)?;
    let out = f(net)?;
    net.transfer(q, Actor::Eve, Actor::Channel)?;
    Ok(out)
}

/// Keeps every qubit on the leg and forwards half of a fresh `psi+` pair in
/// its place.
pub fn intercept_resend(
    net: &mut Network,
    leg: Leg,
    seq: &mut [QubitId],
    eve: &mut EveState,
) -> Result<(), ProtocolError> {
    for slot in seq.iter_mut() {
        let stolen = *slot;
        net.transfer(stolen, Actor::Channel, Actor::Eve)?;
        eve.hold(stolen, Provenance::Stolen(leg));
        let (keep, send) = net.prepare_bell(Actor::Eve, BellLabel::PsiPlus);
        eve.hold(keep, Provenance::FakePairHalf);
        net.transfer(send, Actor::Eve, Actor::Channel)?;
        eve.touch(stolen);
        eve.touch(send);
        *slot = send;
    }
    Ok(())
}

/// Couples an ancilla `alpha|0> + beta|1>` to `target` by a CNOT with the
/// ancilla as control. The ancilla stays with Eve.
pub fn entangle_measure(
    net: &mut Network,
    target: QubitId,
    alpha: Complex64,
    beta: Complex64,
    eve: &mut EveState,
) -> Result<QubitId, ProtocolError> {
    let anc = net.prepare_qubit(Actor::Eve, alpha, beta)?;
    net.apply_cnot(Actor::Eve, anc, target)?;
    eve.hold(anc, Provenance::Ancilla { target });
    eve.touch(target);
    Ok(anc)
}

pub fn flip_all(
    net: &mut Network,
    seq: &[QubitId],
    eve: &mut EveState,
) -> Result<(), ProtocolError> {
    for &q in seq {
        with_qubit(net, q, |n| n.apply_pauli(Actor::Eve, q, PauliLabel::X))?;
        eve.touch(q);
    }
    Ok(())
}

/// Acts on `round(fraction * len)` uniformly chosen slots.
pub fn disturb<R: Rng + ?Sized>(
    net: &mut Network,
    seq: &mut [QubitId],
    mode: DisturbMode,
    fraction: f64,
    eve: &mut EveState,
    rng: &mut R,
) -> Result<(), ProtocolError> {
    let k = ((fraction.clamp(0.0, 1.0)) * seq.len() as f64).round() as usize;
    if k == 0 {
        return Ok(());
    }
    let mut chosen = index::sample(rng, seq.len(), k).into_vec();
    chosen.sort_unstable();
    match mode {
        DisturbMode::RandomPauli => {
            const NON_IDENTITY: [PauliLabel; 3] = [PauliLabel::X, PauliLabel::IY, PauliLabel::Z];
            for &i in &chosen {
                let q = seq[i];
                let p = NON_IDENTITY[rng.random_range(0..3)];
                with_qubit(net, q, |n| n.apply_pauli(Actor::Eve, q, p))?;
                eve.touch(q);
            }
        }
        DisturbMode::Reorder => {
            let mut moved: Vec<QubitId> = chosen.iter().map(|&i| seq[i]).collect();
            moved.shuffle(rng);
            for (&i, q) in chosen.iter().zip(moved) {
                if seq[i] != q {
                    eve.touch(q);
                }
                seq[i] = q;
            }
        }
    }
    Ok(())
}

/// A uniformly random label for Charlie to announce instead of measuring.
pub fn fake_bmo<R: Rng + ?Sized>(rng: &mut R) -> BellLabel {
    BellLabel::ALL[rng.random_range(0..4)]
}
