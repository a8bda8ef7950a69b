use twodoor_core::{Error, Result, Var};
use twodoor_eif::Slot;
use twodoor_nuisance::{Family, ModelSpec};

pub const SETTINGS: [u8; 5] = [0, 1, 2, 3, 4];

/// Nuisance specifications for misspecification setting `id`.
///
/// 0. all correct;
/// 1. `p(Z|A)` omits `A`;
/// 2. all but `p(Z|A)` wrong: `p̂(A=1) = p̂(C=1) = 1/4`, `C` dropped from the
///    treatment model and `E(Y|A,C)`, `Z` dropped from `E(Y|A,Z)` and `E(Y|Z,C)`;
/// 3. `p̂(C=1) = 1/4` and `p(Z|A)` omits `A`;
/// 4. `C` dropped from the treatment model and `Z` from `E(Y|Z,C)`.
///
/// The two-door components use the simplified forms valid on the design:
/// `p(Z|A,C)` is fitted like `p(Z|A)`, and `E(Y|A,Z,C)` like `E(Y|Z,C)`.
pub fn setting_specs(id: u8) -> Result<Vec<ModelSpec>> {
    use Family::*;
    use Slot::*;
    use Var::*;
    let base = |s, f, p: &[Var]| ModelSpec::new(s, f, p);
    let mut specs = vec![
        base(PC, Empirical, &[])?,
        base(PA, Empirical, &[])?,
        base(PAGivenC, Logistic, &[C])?,
        base(PZGivenA, GaussianDensity, &[A])?,
        base(PZGivenAC, GaussianDensity, &[A])?,
        base(MYAC, LinearMean, &[A, C])?,
        base(MYAZ, LinearMean, &[A, Z])?,
        base(MYZC, LinearMean, &[Z, C])?,
        base(MYAZC, LinearMean, &[Z, C])?,
    ];
    let edits: &[(Slot, Option<Var>, Option<f64>)] = match id {
        0 => &[],
        1 => &[(PZGivenA, Some(A), None), (PZGivenAC, Some(A), None)],
        2 => &[
            (PC, None, Some(0.25)),
            (PA, None, Some(0.25)),
            (PAGivenC, Some(C), None),
            (MYAC, Some(C), None),
            (MYAZ, Some(Z), None),
            (MYZC, Some(Z), None),
            (MYAZC, Some(Z), None),
        ],
        3 => &[(PC, None, Some(0.25)), (PZGivenA, Some(A), None), (PZGivenAC, Some(A), None)],
        4 => &[(PAGivenC, Some(C), None), (MYZC, Some(Z), None), (MYAZC, Some(Z), None)],
        _ => return Err(Error::InvalidSpec(format!("unknown misspecification setting {id}"))),
    };
    for &(slot, omit, fix) in edits {
        let s = specs.iter_mut().find(|s| s.slot == slot).expect("every slot present");
        *s = match (omit, fix) {
            (Some(v), _) => s.clone().omit(v)?,
            (_, Some(p)) => s.clone().fix(p)?,
            _ => unreachable!(),
        };
    }
    Ok(specs)
}
