//! The five tabulated `(Q, R)` pairs.

use super::ratfunc::parse_rational_function;
use super::{ShiftVector, ThreeTermRelation};
use crate::error::{Error, Result};

pub const TABLE_SHIFTS: [ShiftVector; 5] = [
    ShiftVector::new(0, 0, 0, 2),
    ShiftVector::new(0, 1, 1, 0),
    ShiftVector::new(0, 2, 2, 0),
    ShiftVector::new(1, 2, 1, -1),
    ShiftVector::new(0, 3, 3, 0),
];

const QR_0002: (&str, &str) = (
    "-(1-a)*(1-b)*x*(c+q-(a+b)*x*q)/((1-c)*(c-a*b*x*q))",
    "(c+(1-a-b)*x*q)/(c-a*b*x*q)",
);

const QR_0110: (&str, &str) = ("-(1-a)*(c-a*b*x)/(a-c)", "a*(1-c)/(a-c)");

const QR_0220: (&str, &str) = (
    "-(1-a)*(1-c*q)*(c-a*b*x)*((1-c)*q+(a-b*q)*x)/((1-b*q)*(a-c)*(a-c*q)*x)",
    "(1-c)*(1-c*q)*((1-a)*c*q+a*(a-b*q)*x)/((1-b*q)*(a-c)*(a-c*q)*x)",
);

const QR_121M1: (&str, &str) = ("(c-b*q+b*(1-a)*x)*q/((1-b*q)*(q-x))", "(1-c)*q/((1-b*q)*(q-x))");

// (cq;q)_2, (bq;q)_2, (c/a;q)_3 and (c;q)_3 written out.
const QR_0330: (&str, &str) = (
    "-(1-a)*(c-a*b*x)*(1-c*q)*(1-c*q^2)\
     *((1-c)*(1-c*q)*q^2+(1-c)*(a-b*q^2)*x*q-(1-a)*(b-c)*x*q^2+(a-b*q)*(a-b*q^2)*x^2)\
     /(a^3*(1-b*q)*(1-b*q^2)*(1-c/a)*(1-c*q/a)*(1-c*q^2/a)*x^2)",
    "(1-c)*(1-c*q)*(1-c*q^2)\
     *((1-a)*(1-c*q)*c*q^2+c*(1-a)*(a-b*q^2)*x*q-a*(1-a)*(b-c)*x*q^2+a*(a-b*q)*(a-b*q^2)*x^2)\
     /(a^3*(1-b*q)*(1-b*q^2)*(1-c/a)*(1-c*q/a)*(1-c*q^2/a)*x^2)",
);

/// Tabulated relation for one of [`TABLE_SHIFTS`].
pub fn qr_lookup(shift: ShiftVector) -> Result<ThreeTermRelation> {
    let (q, r) = match shift.as_array() {
        [0, 0, 0, 2] => QR_0002,
        [0, 1, 1, 0] => QR_0110,
        [0, 2, 2, 0] => QR_0220,
        [1, 2, 1, -1] => QR_121M1,
        [0, 3, 3, 0] => QR_0330,
        _ => return Err(Error::NotInTable(shift.to_string())),
    };
    Ok(ThreeTermRelation { shift, q: parse_rational_function(q)?, r: parse_rational_function(r)? })
}
