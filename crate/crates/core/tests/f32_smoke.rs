//! The generic core instantiated at `f32`.

use num_complex::Complex32 as C;
use qgalois::connection::{det_formula, twisted_closed_form, Connection};
use qgalois::galois::{classify, Classification};
use qgalois::hypersystem::HyperParams;
use qgalois::qseries::{theta, QContext};

fn ctx() -> QContext<f32> {
    QContext::real(0.5f32).unwrap()
}

#[test]
fn theta_functional_equation() {
    let c = ctx();
    for k in 0..16 {
        let z = C::from_polar(0.3 + 0.2 * k as f32, 0.4 * k as f32 + 0.1);
        let t = theta(z, &c).unwrap();
        let tq = theta(c.q * z, &c).unwrap();
        assert!((tq + t / z).norm() < 1e-5 * tq.norm());
    }
}

#[test]
fn connection_and_determinant() {
    let c = ctx();
    let p = HyperParams::from_exponents([0.1f32, 0.2, 0.4], 0.15, 0.33, &c).unwrap();
    let conn = Connection::new(&p, &c).unwrap();
    let z = C::new(0.55, 0.42);
    let num = conn.numeric(z).unwrap();
    let cf = conn.closed_form(z).unwrap();
    assert!(num.rel_err(&cf) < 1e-3, "{}", num.rel_err(&cf));
    let d = twisted_closed_form(&p, z, &c).unwrap().det();
    let f = det_formula(&p, z, &c).unwrap();
    assert!((d - f).norm() < 1e-4 * f.norm());
}

#[test]
fn classification_branch() {
    let c = ctx();
    let p = HyperParams::from_exponents([0.1f32, 0.2, 0.4], 0.15, 0.33, &c).unwrap();
    assert_eq!(classify(&p, &c).unwrap().classification, Classification::Gl3);
}
