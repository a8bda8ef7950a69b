use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha20Rng;
use rand_distr::{Distribution, StandardNormal};
use twodoor_bounds::SimDgpParams;
use twodoor_core::{expit, Dataset, Observation, Result, TreatmentPair};

/// `n` draws from the design, rows generated in order `c, a, z, y`.
pub fn sample_dgp_with<R: Rng + ?Sized>(params: &SimDgpParams, n: usize, rng: &mut R) -> Result<Dataset> {
    params.validate()?;
    let ea = expit(params.alpha);
    let rows = (0..n)
        .map(|_| {
            let c = f64::from(u8::from(rng.random::<f64>() < params.pc));
            let pa = if c == 1.0 { ea } else { 0.5 };
            let a = f64::from(u8::from(rng.random::<f64>() < pa));
            let ez: f64 = StandardNormal.sample(rng);
            let ey: f64 = StandardNormal.sample(rng);
            let z = params.beta * a + params.sigma_z * ez;
            let y = params.gamma1 * z + params.gamma2 * c + params.sigma_y * ey;
            Observation::new(c, a, z, y)
        })
        .collect();
    Dataset::new(rows, TreatmentPair::default())
}

pub fn sample_dgp(params: &SimDgpParams, n: usize, seed: u64) -> Result<Dataset> {
    sample_dgp_with(params, n, &mut ChaCha20Rng::seed_from_u64(seed))
}
