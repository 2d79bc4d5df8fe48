pub mod bounds;
pub mod certify;
pub mod examples;
pub mod exactalg;
pub mod lifts;
pub mod polya;
pub mod polyring;
pub mod polytope;
pub mod serial;
