//! Cross-section polygons, their moments, the principal frame, the taper
//! profile of the rod and the isotropic material.

mod material;
pub(crate) mod polygon;
mod profile;
mod section;
pub mod shapes;

pub use material::Material;
pub use polygon::{polygon_moments, Moments, Point2, Polygon};
pub use profile::{taper_eval, RodProfile, Taper};
pub use section::{principal_frame, CrossSection};
