//! Amoebas, coamoebas and tropical curves of Laurent polynomials.

pub mod amoeba;
pub mod cli;
pub mod coam;
pub mod deform;
pub mod geom;
pub mod grid;
pub mod io;
pub mod lpoly;
pub mod puiseux;
pub mod roots;
pub mod spine;
pub mod trop;
