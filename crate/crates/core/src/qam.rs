//! Gray-labelled square QAM with unit average symbol energy.

use num_complex::Complex64;

use crate::model::SUPPORTED_QAM;
use crate::{Error, Result};

#[derive(Debug, Clone, PartialEq)]
pub struct Qam {
    order: u32,
    side: usize,
    bits_per_axis: usize,
    /// Distance from a level to the origin is `scale·(2i − side + 1)`.
    scale: f64,
}

fn gray(i: usize) -> usize {
    i ^ (i >> 1)
}

fn gray_inverse(mut g: usize) -> usize {
    let mut i = g;
    while g > 1 {
        g >>= 1;
        i ^= g;
    }
    i
}

impl Qam {
    pub fn new(order: u32) -> Result<Self> {
        if !SUPPORTED_QAM.contains(&order) {
            return Err(Error::UnsupportedQam(order));
        }
        let side = (order as f64).sqrt().round() as usize;
        Ok(Self {
            order,
            side,
            bits_per_axis: side.trailing_zeros() as usize,
            scale: (1.5 / (order as f64 - 1.0)).sqrt(),
        })
    }

    pub fn order(&self) -> u32 {
        self.order
    }

    pub fn bits_per_symbol(&self) -> usize {
        2 * self.bits_per_axis
    }

    fn level(&self, gray_label: usize) -> f64 {
        let i = gray_inverse(gray_label);
        self.scale * (2.0 * i as f64 - (self.side as f64 - 1.0))
    }

    fn slice_axis(&self, v: f64) -> usize {
        let pos = ((v / self.scale + self.side as f64 - 1.0) / 2.0).round();
        gray(pos.clamp(0.0, self.side as f64 - 1.0) as usize)
    }

    /// Symbol for label `idx`: high bits select the in-phase level, low bits
    /// the quadrature level, each Gray coded.
    pub fn symbol(&self, idx: usize) -> Complex64 {
        let mask = self.side - 1;
        Complex64::new(self.level(idx >> self.bits_per_axis), self.level(idx & mask))
    }

    /// Label of the constellation point closest to `z`.
    pub fn slice(&self, z: Complex64) -> usize {
        (self.slice_axis(z.re) << self.bits_per_axis) | self.slice_axis(z.im)
    }

    pub fn constellation(&self) -> Vec<Complex64> {
        (0..self.order as usize).map(|i| self.symbol(i)).collect()
    }

    /// Maps a bit stream (MSB first per symbol) to symbols.
    pub fn map(&self, bits: &[bool]) -> Result<Vec<Complex64>> {
        let n = self.bits_per_symbol();
        if bits.len() % n != 0 {
            return Err(Error::Domain(format!(
                "{} bits is not a multiple of {n} bits per symbol",
                bits.len()
            )));
        }
        Ok(bits
            .chunks(n)
            .map(|c| self.symbol(c.iter().fold(0, |acc, b| (acc << 1) | *b as usize)))
            .collect())
    }

    /// Minimum-distance demapping of soft symbols received with amplitude
    /// `√tx_power`.
    pub fn demap(&self, soft: &[Complex64], tx_power: f64) -> Vec<bool> {
        let n = self.bits_per_symbol();
        let inv = 1.0 / tx_power.sqrt();
        soft.iter()
            .flat_map(|z| {
                let label = self.slice(z * inv);
                (0..n).rev().map(move |b| (label >> b) & 1 == 1)
            })
            .collect()
    }
}
