use super::landmarks::{LandmarkSet, Point, NUM_LANDMARKS};

/// Canonical frontal face, 68 iBUG points in the unit square.
///
/// A mean face shape, mirror-symmetrized about `x = 0.5`, translated so its
/// centroid sits at `(0.5, 0.5)` and scaled so the widest extent touches the
/// square's border.
#[rustfmt::skip]
pub const MEAN_SHAPE: [(f64, f64); NUM_LANDMARKS] = [
    (0.0473107929349137, 0.258878276456159),
    (0.0494909654352352, 0.379350527350965),
    (0.0613321779084594, 0.50073640919709),
    (0.0852227525549597, 0.620300273698182),
    (0.131483275795623, 0.731634713518335),
    (0.203272680283469, 0.829344119459512),
    (0.290674438403047, 0.912568666748277),
    (0.388863068266109, 0.980461191148467),
    (0.5, 1.0),
    (0.611136931733891, 0.980461191148467),
    (0.709325561596953, 0.912568666748277),
    (0.796727319716531, 0.829344119459512),
    (0.868516724204377, 0.731634713518335),
    (0.91477724744504, 0.620300273698182),
    (0.938667822091541, 0.50073640919709),
    (0.950509034564765, 0.379350527350965),
    (0.952689207065086, 0.258878276456159),
    (0.141224643771116, 0.169098346546549),
    (0.197802556471094, 0.12476028660219),
    (0.273558811035328, 0.113414264230702),
    (0.351451121807286, 0.125989604518543),
    (0.425316883064486, 0.157340061040366),
    (0.574683116935514, 0.157340061040366),
    (0.648548878192714, 0.125989604518543),
    (0.726441188964672, 0.113414264230702),
    (0.802197443528906, 0.12476028660219),
    (0.858775356228884, 0.169098346546549),
    (0.5, 0.246661344801086),
    (0.5, 0.325393763010431),
    (0.5, 0.404158923885693),
    (0.5, 0.48471348628897),
    (0.412019006149673, 0.535118677129221),
    (0.45413345886282, 0.552338433141702),
    (0.5, 0.567044707171016),
    (0.54586654113718, 0.552338433141702),
    (0.587980993850327, 0.535118677129221),
    (0.230784783467029, 0.254318190305278),
    (0.278054346281945, 0.226409409760814),
    (0.335904992518344, 0.22747879319534),
    (0.384483588930682, 0.264700253001285),
    (0.33125216680805, 0.275311680027726),
    (0.274902019499653, 0.27460439620786),
    (0.615516411069318, 0.264700253001285),
    (0.664095007481656, 0.22747879319534),
    (0.721945653718055, 0.226409409760814),
    (0.769215216532971, 0.254318190305278),
    (0.725097980500347, 0.27460439620786),
    (0.66874783319195, 0.275311680027726),
    (0.324219062581974, 0.677214239958371),
    (0.388035792548261, 0.651381804394458),
    (0.453229285185203, 0.639983192913617),
    (0.5, 0.65111534908185),
    (0.546770714814797, 0.639983192913617),
    (0.611964207451739, 0.651381804394458),
    (0.675780937418026, 0.677214239958371),
    (0.614523981720287, 0.743027170485867),
    (0.550750043104481, 0.772291144542356),
    (0.5, 0.777605023252536),
    (0.449249956895519, 0.772291144542356),
    (0.385476018279713, 0.743027170485867),
    (0.351637930771381, 0.681552712143704),
    (0.452748464000822, 0.678662180600567),
    (0.5, 0.683426481139363),
    (0.547251535999178, 0.678662180600567),
    (0.648362069228619, 0.681552712143704),
    (0.548203958937954, 0.712475733764894),
    (0.5, 0.718391417192267),
    (0.451796041062046, 0.712475733764894),
];

/// The alignment target: [`MEAN_SHAPE`] scaled to a square of
/// `target_size` pixels.
#[derive(Clone, Debug, PartialEq)]
pub struct FaceTemplate {
    points: [Point; NUM_LANDMARKS],
    target_size: usize,
}

impl Default for FaceTemplate {
    fn default() -> Self {
        Self::new(128)
    }
}

impl FaceTemplate {
    pub fn new(target_size: usize) -> Self {
        assert!(target_size >= 1, "template size must be positive");
        Self { points: MEAN_SHAPE.map(|(x, y)| Point::new(x, y)), target_size }
    }

    /// Unit-square points.
    pub fn points(&self) -> &[Point; NUM_LANDMARKS] {
        &self.points
    }

    pub fn target_size(&self) -> usize {
        self.target_size
    }

    /// Template points in pixels for an aligned square of side
    /// `scale · target_size`.
    pub fn scaled_points(&self, scale: f64) -> [Point; NUM_LANDMARKS] {
        let side = scale * self.target_size as f64;
        self.points.map(|p| Point::new(p.x * side, p.y * side))
    }

    /// Side of the aligned square for `scale`, in whole pixels.
    pub fn aligned_side(&self, scale: f64) -> usize {
        ((scale * self.target_size as f64).round() as usize).max(1)
    }

    /// Template landmarks placed in an image: scaled by `side` and offset.
    pub fn place(&self, side: f64, origin: Point) -> LandmarkSet {
        let pts = self.points.map(|p| Point::new(origin.x + p.x * side, origin.y + p.y * side));
        LandmarkSet::new(pts).expect("template points are finite")
    }
}
