//! Angle tables for the compiled generator powers `U_sigma^k`, `k = 1..=9`.
//!
//! Every fragment has the same layout (see [`crate::rep::compiled_generator`]).
//! `k = 1, 2` use closed forms; `k >= 3` were fitted numerically against the
//! 8x8 target and are checked against it by the test suite.

use std::f64::consts::PI;

use crate::error::{Error, Result};
use crate::fib::PHI;

pub const MAX_POWER: usize = 9;

/// Angles of one fragment, in radians.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FragmentAngles {
    pub alpha: [f64; 4],
    pub beta: [f64; 4],
    pub chi: [f64; 3],
    pub theta: [f64; 3],
}

/// Angle table version, bumped whenever a fitted entry changes.
pub const TABLE_VERSION: u32 = 2;

fn power_one() -> FragmentAngles {
    // The square root argument is 4/(3 phi); with 3/(4 phi) the fragment
    // misses the target by O(1).
    let a = (4.0 / (3.0 * PHI)).sqrt().asin() - PI;
    let b = (PHI * (3.0f64 / 8.0).sqrt()).asin();
    FragmentAngles {
        alpha: [a, -a, -a, a],
        beta: [0.0, -b, -b - 3.0 * PI / 10.0, -2.0 * b - 3.0 * PI / 10.0],
        chi: [-b, PI / 2.0, -b],
        theta: [-PI / 10.0, 2.0 * b + 3.0 * PI / 10.0, PI / 5.0],
    }
}

fn power_two() -> FragmentAngles {
    let a = (2.0 / (3.0 + 2.0 * PHI).sqrt()).asin();
    let b = ((3.0 * PHI - 1.0).sqrt() / 2.0).asin() - PI;
    FragmentAngles {
        alpha: [PI - a, a, -a, PI - a],
        beta: [0.0, -b, 2.0 * PI / 5.0 - b, -2.0 * b - 3.0 * PI / 5.0],
        chi: [-b, 3.0 * PI / 5.0, -b],
        theta: [PI / 5.0, 2.0 * b + 3.0 * PI / 5.0, -2.0 * PI / 5.0],
    }
}

const FITTED: [FragmentAngles; 7] = [
    // k = 3
    FragmentAngles {
        alpha: [1.6433345817839533, -1.4982580718058398, 1.7125613732658629, 1.4290312803239305],
        beta: [-0.15778910801110527, -2.0250848755695667, -1.2357135594627717, 0.06412865700324492],
        chi: [1.274296886031332, -2.589827362856907, 1.2998422164660166],
        theta: [-3.0650394136047217, 0.7971132710476593, 0.8659245560918662],
    },
    // k = 4
    FragmentAngles {
        alpha: [-1.5839674682658371, -1.557625185323956, -1.3988997508397827, -1.7426929027500104],
        beta: [0.7621657793109435, 2.683430727549076, 1.13819654351322, -0.7398187148953373],
        chi: [1.9212649482381325, 2.054816296212885, -1.8780152584085574],
        theta: [2.9717319495307835, 2.588760851583188, -1.715094888094866],
    },
    // k = 5
    FragmentAngles {
        alpha: [1.9404992348120047, 1.9404992348120047, -1.9404992348120083, -1.9404992348120085],
        beta: [-2.832021194609171, -2.1074459925289006, 2.604942987855784, -1.261224867814281],
        chi: [-2.417017451509523, -1.570796326794898, -0.7245752020802717],
        theta: [1.5707963267948943, -1.5707963267948928, 2.5363628304664818e-15],
    },
    // k = 6
    FragmentAngles {
        alpha: [1.344061823206332, -1.7975308303834612, 1.6518459379742716, -1.4897467156155217],
        beta: [-1.4805403920112148, 2.961951092780931, -1.7760000303627985, 0.1363854508970402],
        chi: [1.3008988312023524, 1.0867763573769065, -1.2292071723299545],
        theta: [0.16986070405900974, 0.4378904533046303, 1.7150948880948664],
    },
    // k = 7
    FragmentAngles {
        alpha: [1.3625210611414118, 1.7790715924483813, 1.3161265802545041, 1.8254660733352892],
        beta: [-0.3452787254794384, -2.140514119580678, 0.21170721790232144, -1.528759786754848],
        chi: [-1.7952353941012396, 2.589827362856905, -1.7404670046571695],
        theta: [3.065039413604721, 0.16445002521339927, -0.8659245560918658],
    },
    // k = 8
    FragmentAngles {
        alpha: [0.9635647012193076, 2.1780279523704853, -1.9038329121937445, -1.2377597413960486],
        beta: [-0.17269910265607052, -1.450158526832153, -0.8218399961141919, 0.16060838953999937],
        chi: [-1.2774594241760826, 1.2566370614359168, 0.9824483856541912],
        theta: [2.513274122871833, 1.5516480999578046, -3.141592653589792],
    },
    // k = 9
    FragmentAngles {
        alpha: [-1.131631814340604, 2.0099608392491892, 1.145475021955068, 1.996117631634725],
        beta: [0.05594288079590165, -1.4030256435170438, -2.3455034395939807, -0.9334462845510018],
        chi: [1.6826241292768478, -1.5707963267948981, 1.412057155042979],
        theta: [-2.8274333882308147, 0.9893891653469026, 2.5132741228718354],
    },
];

pub fn fragment_angles(k: usize) -> Result<FragmentAngles> {
    match k {
        1 => Ok(power_one()),
        2 => Ok(power_two()),
        3..=MAX_POWER => Ok(FITTED[k - 3]),
        _ => Err(Error::Range(format!("power {k} outside [1, {MAX_POWER}]"))),
    }
}
