//! Adaptive Dormand–Prince 8(5) integration of the Bloch equations.
//!
//! The right-hand side is evaluated from the complex equations directly rather
//! than from the assembled Liouvillian, so agreement with the propagator checks
//! both the matrix and the matrix functions.

use nalgebra::Complex;
use serde::{Deserialize, Serialize};

use crate::bloch::{DensityVector, Vector9};
use crate::error::{Error, Result};
use crate::params::PhysicalParams;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct OracleConfig {
    pub rel_tol: f64,
    pub abs_tol: f64,
    /// Largest step in 1/Γ; `None` leaves it to error control.
    pub max_step: Option<f64>,
    pub max_steps: usize,
}

impl Default for OracleConfig {
    fn default() -> Self {
        OracleConfig { rel_tol: 1e-10, abs_tol: 1e-12, max_step: None, max_steps: 50_000_000 }
    }
}

impl OracleConfig {
    pub fn validate(&self) -> Result<()> {
        if !(self.rel_tol > 0.0 && self.abs_tol > 0.0) {
            return Err(Error::InvalidParams("oracle tolerances must be positive".into()));
        }
        if self.max_step.is_some_and(|h| !(h > 0.0)) {
            return Err(Error::InvalidParams("oracle max_step must be positive".into()));
        }
        Ok(())
    }
}

/// State plus the running integral of Im σ_eC.
type State = [f64; 10];

struct Rhs {
    g: f64,
    alpha: f64,
    gamma: f64,
    feed: f64,
    delta: f64,
    det: f64,
}

impl Rhs {
    fn new(p: &PhysicalParams, velocity: f64) -> Self {
        Rhs {
            g: p.coupling(),
            alpha: p.branching,
            gamma: p.ground_relax,
            feed: p.feed,
            delta: p.raman_detuning,
            det: p.laser_detuning - velocity,
        }
    }

    fn eval(&self, s: &State, out: &mut State) {
        let i = Complex::new(0.0, 1.0);
        let (dd, cc, ee) = (s[0], s[1], s[2]);
        let ed = Complex::new(s[3], s[4]);
        let ec = Complex::new(s[5], s[6]);
        let dc = Complex::new(s[7], s[8]);
        let (g, d, gam) = (self.g, self.delta, self.gamma);
        let opt = Complex::new(0.5, -self.det);

        let ddd = self.alpha * 0.5 * ee + d * dc.im - gam * dd + self.feed;
        let dcc = self.alpha * 0.5 * ee - d * dc.im + 2.0 * g * ec.im - gam * cc + self.feed;
        let dee = -ee - 2.0 * g * ec.im - gam * ee;
        let ded = -opt * ed - i * (d / 2.0) * ec - i * g * dc.conj() - gam * ed;
        let dec = -opt * ec - i * (d / 2.0) * ed - i * g * (cc - ee) - gam * ec;
        let ddc = i * (d / 2.0) * (cc - dd) + i * g * ed.conj() - gam * dc;

        *out = [ddd, dcc, dee, ded.re, ded.im, dec.re, dec.im, ddc.re, ddc.im, ec.im];
    }
}

// The system is autonomous, so the stage nodes c_i never enter.
const A21: f64 = 5.26001519587677318785587544488e-02;
const A31: f64 = 1.97250569845378994544595329183e-02;
const A32: f64 = 5.91751709536136983633785987549e-02;
const A41: f64 = 2.95875854768068491816892993775e-02;
const A43: f64 = 8.87627564304205475450678981324e-02;
const A51: f64 = 2.41365134159266685502369798665e-01;
const A53: f64 = -8.84549479328286085344864962717e-01;
const A54: f64 = 9.24834003261792003115737966543e-01;
const A61: f64 = 3.70370370370370370370370370370e-02;
const A64: f64 = 1.70828608729473871279604482173e-01;
const A65: f64 = 1.25467687566822425016691814123e-01;
const A71: f64 = 3.71093750000000000000000000000e-02;
const A74: f64 = 1.70252211019544039314978060272e-01;
const A75: f64 = 6.02165389804559606850219397283e-02;
const A76: f64 = -1.75781250000000000000000000000e-02;
const A81: f64 = 3.70920001185047927108779319836e-02;
const A84: f64 = 1.70383925712239993810214054705e-01;
const A85: f64 = 1.07262030446373284651809199168e-01;
const A86: f64 = -1.53194377486244017527936158236e-02;
const A87: f64 = 8.27378916381402288758473766002e-03;
const A91: f64 = 6.24110958716075717114429577812e-01;
const A94: f64 = -3.36089262944694129406857109825e+00;
const A95: f64 = -8.68219346841726006818189891453e-01;
const A96: f64 = 2.75920996994467083049415600797e+01;
const A97: f64 = 2.01540675504778934086186788979e+01;
const A98: f64 = -4.34898841810699588477366255144e+01;
const A101: f64 = 4.77662536438264365890433908527e-01;
const A104: f64 = -2.48811461997166764192642586468e+00;
const A105: f64 = -5.90290826836842996371446475743e-01;
const A106: f64 = 2.12300514481811942347288949897e+01;
const A107: f64 = 1.52792336328824235832596922938e+01;
const A108: f64 = -3.32882109689848629194453265587e+01;
const A109: f64 = -2.03312017085086261358222928593e-02;
const A111: f64 = -9.37142430085987325717040528057e-01;
const A114: f64 = 5.18637242884406370830023853209e+00;
const A115: f64 = 1.09143734899672957818500254654e+00;
const A116: f64 = -8.14978701074692612513997267357e+00;
const A117: f64 = -1.85200656599969598641566180701e+01;
const A118: f64 = 2.27394870993505042818970056734e+01;
const A119: f64 = 2.49360555267965238987089396762e+00;
const A1110: f64 = -3.04676447189821950038236690220e+00;
const A121: f64 = 2.27331014751653820792359768449e+00;
const A124: f64 = -1.05344954667372501984066689879e+01;
const A125: f64 = -2.00087205822486249909675718444e+00;
const A126: f64 = -1.79589318631187989172765950534e+01;
const A127: f64 = 2.79488845294199600508499808837e+01;
const A128: f64 = -2.85899827713502369474065508674e+00;
const A129: f64 = -8.87285693353062954433549289258e+00;
const A1210: f64 = 1.23605671757943030647266201528e+01;
const A1211: f64 = 6.43392746015763530355970484046e-01;

const B1: f64 = 5.42937341165687622380535766363e-02;
const B6: f64 = 4.45031289275240888144113950566e+00;
const B7: f64 = 1.89151789931450038304281599044e+00;
const B8: f64 = -5.80120396001058478146721142270e+00;
const B9: f64 = 3.11164366957819894408916062370e-01;
const B10: f64 = -1.52160949662516078556178806805e-01;
const B11: f64 = 2.01365400804030348374776537501e-01;
const B12: f64 = 4.47106157277725905176885569043e-02;

const E1: f64 = 0.1312004499419488073250102996e-01;
const E6: f64 = -0.1225156446376204440720569753e+01;
const E7: f64 = -0.4957589496572501915214079952e+00;
const E8: f64 = 0.1664377182454986536961530415e+01;
const E9: f64 = -0.3503288487499736816886487290e+00;
const E10: f64 = 0.3341791187130174790297318841e+00;
const E11: f64 = 0.8192320648511571246570742613e-01;
const E12: f64 = -0.2235530786388629525884427845e-01;

const SAFETY: f64 = 0.9;
const MIN_FACTOR: f64 = 0.333;
const MAX_FACTOR: f64 = 6.0;

fn combo(y: &State, h: f64, terms: &[(f64, &State)]) -> State {
    let mut out = *y;
    for (c, k) in terms {
        for j in 0..10 {
            out[j] += h * c * k[j];
        }
    }
    out
}

/// One DOP853 step: (8th-order solution, 5th-order error estimate).
fn step(f: &Rhs, y: &State, k1: &State, h: f64) -> (State, State) {
    let mut k = [[0.0; 10]; 12];
    k[0] = *k1;
    let stages: [&[(usize, f64)]; 11] = [
        &[(0, A21)],
        &[(0, A31), (1, A32)],
        &[(0, A41), (2, A43)],
        &[(0, A51), (2, A53), (3, A54)],
        &[(0, A61), (3, A64), (4, A65)],
        &[(0, A71), (3, A74), (4, A75), (5, A76)],
        &[(0, A81), (3, A84), (4, A85), (5, A86), (6, A87)],
        &[(0, A91), (3, A94), (4, A95), (5, A96), (6, A97), (7, A98)],
        &[(0, A101), (3, A104), (4, A105), (5, A106), (6, A107), (7, A108), (8, A109)],
        &[(0, A111), (3, A114), (4, A115), (5, A116), (6, A117), (7, A118), (8, A119), (9, A1110)],
        &[(0, A121), (3, A124), (4, A125), (5, A126), (6, A127), (7, A128), (8, A129), (9, A1210), (10, A1211)],
    ];
    for (s, coeffs) in stages.iter().enumerate() {
        let mut yi = *y;
        for (j, a) in coeffs.iter() {
            for m in 0..10 {
                yi[m] += h * a * k[*j][m];
            }
        }
        let mut out = [0.0; 10];
        f.eval(&yi, &mut out);
        k[s + 1] = out;
    }
    let sol = combo(
        y,
        h,
        &[(B1, &k[0]), (B6, &k[5]), (B7, &k[6]), (B8, &k[7]), (B9, &k[8]), (B10, &k[9]), (B11, &k[10]), (B12, &k[11])],
    );
    let mut err = [0.0; 10];
    for m in 0..10 {
        err[m] = h
            * (E1 * k[0][m]
                + E6 * k[5][m]
                + E7 * k[6][m]
                + E8 * k[7][m]
                + E9 * k[8][m]
                + E10 * k[9][m]
                + E11 * k[10][m]
                + E12 * k[11][m]);
    }
    (sol, err)
}

fn integrate(f: &Rhs, y0: State, t_end: f64, cfg: &OracleConfig) -> Result<State> {
    cfg.validate()?;
    if !(t_end >= 0.0) || !t_end.is_finite() {
        return Err(Error::NonFinite("ode_oracle"));
    }
    let mut y = y0;
    if t_end == 0.0 {
        return Ok(y);
    }
    let mut t = 0.0;
    let mut h = (1e-3f64).min(t_end);
    if let Some(hm) = cfg.max_step {
        h = h.min(hm);
    }
    let mut k1 = [0.0; 10];
    f.eval(&y, &mut k1);
    let mut steps = 0usize;
    while t < t_end {
        if steps >= cfg.max_steps {
            return Err(Error::StepSizeUnderflow { t, h });
        }
        steps += 1;
        let last = t + h >= t_end;
        let hs = if last { t_end - t } else { h };
        let (ynew, err) = step(f, &y, &k1, hs);
        let mut norm = 0.0;
        for m in 0..10 {
            let sc = cfg.abs_tol + cfg.rel_tol * y[m].abs().max(ynew[m].abs());
            norm += (err[m] / sc).powi(2);
        }
        let norm = (norm / 10.0).sqrt();
        if !norm.is_finite() {
            return Err(Error::NonFinite("ode_oracle step"));
        }
        let fac = if norm == 0.0 { MAX_FACTOR } else { (SAFETY * norm.powf(-1.0 / 8.0)).clamp(MIN_FACTOR, MAX_FACTOR) };
        if norm <= 1.0 {
            t = if last { t_end } else { t + hs };
            y = ynew;
            f.eval(&y, &mut k1);
            h = hs * fac;
        } else {
            h = hs * fac.min(1.0);
        }
        if let Some(hm) = cfg.max_step {
            h = h.min(hm);
        }
        if h < 1e-14 * t.max(1.0) {
            return Err(Error::StepSizeUnderflow { t, h });
        }
    }
    Ok(y)
}

fn initial(sigma0: &DensityVector) -> State {
    let mut y = [0.0; 10];
    y[..9].copy_from_slice(sigma0.0.as_slice());
    y
}

/// σ(t) from σ(0) = σ0 by direct time stepping.
pub fn ode_oracle(
    p: &PhysicalParams,
    velocity: f64,
    sigma0: &DensityVector,
    t: f64,
    cfg: &OracleConfig,
) -> Result<DensityVector> {
    let y = integrate(&Rhs::new(p, velocity), initial(sigma0), t, cfg)?;
    Ok(DensityVector(Vector9::from_column_slice(&y[..9])))
}

/// S(v_z) = |v_z| ∫₀^{kL/|v_z|} Im σ_eC dt by time stepping.
pub fn oracle_path_integral(
    p: &PhysicalParams,
    velocity: f64,
    sigma0: &DensityVector,
    cfg: &OracleConfig,
) -> Result<f64> {
    let v = velocity.abs();
    if v == 0.0 {
        return Err(Error::DegenerateVelocity { velocity, v_min: f64::MIN_POSITIVE });
    }
    let y = integrate(&Rhs::new(p, velocity), initial(sigma0), p.cell_length / v, cfg)?;
    Ok(v * y[9])
}
