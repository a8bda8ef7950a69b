#![allow(dead_code)]
use twodoor_core::DiscreteJoint;

pub fn normalise(w: &[f64]) -> Vec<f64> {
    let s: f64 = w.iter().sum();
    w.iter().map(|x| x / s).collect()
}

pub struct Draw<'a> {
    raw: std::iter::Cycle<std::slice::Iter<'a, f64>>,
}

impl<'a> Draw<'a> {
    pub fn new(raw: &'a [f64]) -> Self {
        Self { raw: raw.iter().cycle() }
    }
    pub fn simplex(&mut self, k: usize) -> Vec<f64> {
        normalise(&(0..k).map(|_| *self.raw.next().unwrap()).collect::<Vec<_>>())
    }
}

fn sup(k: usize) -> Vec<f64> {
    (0..k).map(|i| i as f64).collect()
}

/// `C→A, A→Z, (Z,C)→Y`: every assumption set holds.
pub fn fig_f(nc: usize, na: usize, nz: usize, ny: usize, raw: &[f64]) -> DiscreteJoint {
    let mut d = Draw::new(raw);
    let pc = d.simplex(nc);
    let pa: Vec<_> = (0..nc).map(|_| d.simplex(na)).collect();
    let pz: Vec<_> = (0..na).map(|_| d.simplex(nz)).collect();
    let py: Vec<Vec<_>> = (0..nc).map(|_| (0..nz).map(|_| d.simplex(ny)).collect()).collect();
    DiscreteJoint::from_factors(
        [sup(nc), sup(na), sup(nz), (0..ny).map(|i| 0.5 * i as f64 - 0.3).collect()],
        |c| pc[c],
        |c, a| pa[c][a],
        |_, a, z| pz[a][z],
        |c, _, z, y| py[c][z][y],
    )
    .unwrap()
}

/// `C→A, (A,C)→Z, (Z,C)→Y`: back-door and two-door hold.
pub fn fig_d(nc: usize, nz: usize, ny: usize, raw: &[f64]) -> DiscreteJoint {
    let mut d = Draw::new(raw);
    let pc = d.simplex(nc);
    let pa: Vec<_> = (0..nc).map(|_| d.simplex(2)).collect();
    let pz: Vec<Vec<_>> = (0..nc).map(|_| (0..2).map(|_| d.simplex(nz)).collect()).collect();
    let py: Vec<Vec<_>> = (0..nc).map(|_| (0..nz).map(|_| d.simplex(ny)).collect()).collect();
    DiscreteJoint::from_factors(
        [sup(nc), sup(2), sup(nz), sup(ny)],
        |c| pc[c],
        |c, a| pa[c][a],
        |c, a, z| pz[c][a][z],
        |c, _, z, y| py[c][z][y],
    )
    .unwrap()
}

/// Unrestricted joint with full support.
pub fn general(nc: usize, nz: usize, ny: usize, raw: &[f64]) -> DiscreteJoint {
    let mut d = Draw::new(raw);
    let pmf = d.simplex(nc * 2 * nz * ny);
    DiscreteJoint::new(sup(nc), sup(2), sup(nz), sup(ny), pmf).unwrap()
}
