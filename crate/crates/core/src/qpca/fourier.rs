//! Fourier readout of the ancilla register.
//!
//! Controlled powers of `e^{-iHt₀}` leave the ancilla in
//! `Σ_x e^{-2πiφx}|x⟩` with `φ = λt₀/2π`. The readout transform
//! `|x⟩ ↦ N^{-1/2} Σ_k e^{2πixk/N}|k⟩` undoes that phase ramp and peaks at
//! `k = Nφ`. It is built from Hadamards, controlled phases and a final bit
//! reversal, and acts on register-major arrays (`index = x·inner + t`).

use std::f64::consts::{FRAC_1_SQRT_2, PI};

use num_complex::Complex64;

/// Applies the readout transform in place to every inner slot of `amps`.
pub fn apply_readout_transform(amps: &mut [Complex64], bits: u32, inner: usize) {
    let n = 1usize << bits;
    assert_eq!(amps.len(), n * inner, "register layout mismatch");
    for p in (0..bits).rev() {
        hadamard(amps, p, inner);
        for q in (0..p).rev() {
            let angle = 2.0 * PI / (1u64 << (p - q + 1)) as f64;
            controlled_phase(amps, p, q, angle, inner);
        }
    }
    reverse_bits(amps, bits, inner);
}

fn hadamard(amps: &mut [Complex64], bit: u32, inner: usize) {
    let stride = 1usize << bit;
    let n = amps.len() / inner;
    for x in 0..n {
        if x & stride != 0 {
            continue;
        }
        let y = x | stride;
        for t in 0..inner {
            let a = amps[x * inner + t];
            let b = amps[y * inner + t];
            amps[x * inner + t] = (a + b) * FRAC_1_SQRT_2;
            amps[y * inner + t] = (a - b) * FRAC_1_SQRT_2;
        }
    }
}

fn controlled_phase(amps: &mut [Complex64], p: u32, q: u32, angle: f64, inner: usize) {
    let mask = (1usize << p) | (1usize << q);
    let phase = Complex64::from_polar(1.0, angle);
    let n = amps.len() / inner;
    for x in (0..n).filter(|x| x & mask == mask) {
        for z in &mut amps[x * inner..(x + 1) * inner] {
            *z *= phase;
        }
    }
}

fn reverse_bits(amps: &mut [Complex64], bits: u32, inner: usize) {
    if bits == 0 {
        return;
    }
    for x in 0..1usize << bits {
        let r = x.reverse_bits() >> (usize::BITS - bits);
        if r <= x {
            continue;
        }
        for t in 0..inner {
            amps.swap(x * inner + t, r * inner + t);
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::random::Seeded;

    fn dft_oracle(v: &[Complex64]) -> Vec<Complex64> {
        let n = v.len();
        (0..n)
            .map(|k| {
                v.iter()
                    .enumerate()
                    .map(|(x, a)| a * Complex64::from_polar(1.0, 2.0 * PI * (x * k) as f64 / n as f64))
                    .sum::<Complex64>()
                    / (n as f64).sqrt()
            })
            .collect()
    }

    #[test]
    fn matches_direct_dft() {
        let mut rng = Seeded::new(21);
        for bits in 0..=6 {
            let n = 1 << bits;
            let v: Vec<Complex64> = (0..n).map(|_| rng.complex_gaussian()).collect();
            let mut got = v.clone();
            apply_readout_transform(&mut got, bits, 1);
            for (g, w) in got.iter().zip(dft_oracle(&v)) {
                assert!((g - w).norm() < 1e-12, "bits {bits}");
            }
        }
    }

    #[test]
    fn acts_independently_on_inner_slots() {
        let mut rng = Seeded::new(22);
        let bits = 3;
        let inner = 3;
        let v: Vec<Complex64> = (0..8 * inner).map(|_| rng.complex_gaussian()).collect();
        let mut got = v.clone();
        apply_readout_transform(&mut got, bits, inner);
        for t in 0..inner {
            let slice: Vec<Complex64> = (0..8).map(|x| v[x * inner + t]).collect();
            let want = dft_oracle(&slice);
            for x in 0..8 {
                assert!((got[x * inner + t] - want[x]).norm() < 1e-12);
            }
        }
    }

    #[test]
    fn concentrates_dyadic_phase_ramp() {
        let bits = 4;
        let n = 16;
        let phi = 5.0 / 16.0;
        let mut v: Vec<Complex64> = (0..n)
            .map(|x| Complex64::from_polar(0.25, -2.0 * PI * phi * x as f64))
            .collect();
        apply_readout_transform(&mut v, bits, 1);
        assert!((v[5].norm() - 1.0).abs() < 1e-12);
    }
}
