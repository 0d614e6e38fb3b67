use super::roles::{PredictorRole, ROLE_COUNT};
use crate::error::{Error, Result};
use crate::lifting::{Orientation, PyramidLayout, Subband, SubbandPyramid};

/// One context row: the eleven role values in role order.
pub type ContextRow = [i32; ROLE_COUNT];

/// Aligned predictor columns and dependent values for one detail band.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ContextMatrix {
    pub band: usize,
    pub rows: Vec<ContextRow>,
    pub dependent: Vec<i32>,
}

impl ContextMatrix {
    pub fn len(&self) -> usize {
        self.rows.len()
    }

    pub fn is_empty(&self) -> bool {
        self.rows.is_empty()
    }

    pub fn column(&self, role: PredictorRole) -> Vec<i32> {
        self.rows.iter().map(|row| row[role.index()]).collect()
    }
}

/// The coarser and sibling bands a detail band's contexts read from.
///
/// Level-1 bands take their parent from LL, which has the same resolution,
/// so the parent sits at the coefficient's own position there. Deeper bands
/// halve the position. Aunts sit at the parent position in the other two
/// orientations of the parent level; a level-1 aunt is used only when that
/// sibling precedes the band in coding order.
#[derive(Debug, Clone, Copy)]
pub(crate) struct ContextSource<'a> {
    parent: &'a Subband,
    aunts: [Option<&'a Subband>; 2],
    halve: bool,
    rows: usize,
    cols: usize,
}

impl<'a> ContextSource<'a> {
    /// `available` holds at least the bands preceding `band` in coding order.
    pub(crate) fn new(layout: &PyramidLayout, available: &'a [Subband], band: usize) -> Result<Self> {
        let geoms = layout.bands();
        let g = *geoms
            .get(band)
            .ok_or_else(|| Error::arg(format!("band index {band} out of range ({} bands)", geoms.len())))?;
        if g.orientation == Orientation::LL {
            return Err(Error::arg("the LL band has no predictor context"));
        }
        if available.len() < band {
            return Err(Error::Sequencing {
                band,
                message: format!("only {} of {band} preceding bands are available", available.len()),
            });
        }
        let lookup = |level: u8, o: Orientation| -> usize {
            layout.index_of(level, o).expect("orientation exists at every level")
        };
        let (parent_idx, aunt_level) = if g.level == 1 {
            (0, 1)
        } else {
            (lookup(g.level - 1, g.orientation), g.level - 1)
        };
        let a1 = g.orientation.next_detail();
        let a2 = a1.next_detail();
        let aunt = |o| {
            let idx = lookup(aunt_level, o);
            (idx < band).then(|| &available[idx])
        };
        Ok(ContextSource {
            parent: &available[parent_idx],
            aunts: [aunt(a1), aunt(a2)],
            halve: g.level > 1,
            rows: g.rows,
            cols: g.cols,
        })
    }

    /// Context of position `(r, c)`. `current` is the band being coded;
    /// only raster-earlier positions of it are read.
    #[inline]
    pub(crate) fn row(&self, current: &[i32], r: usize, c: usize) -> ContextRow {
        let (r, c) = (r as isize, c as isize);
        let (pr, pc) = if self.halve { (r / 2, c / 2) } else { (r, c) };
        let own = |dr: isize, dc: isize| -> i32 {
            let (rr, cc) = (r + dr, c + dc);
            if rr < 0 || cc < 0 || cc as usize >= self.cols {
                0
            } else {
                current[rr as usize * self.cols + cc as usize]
            }
        };
        let p = self.parent;
        let aunt = |a: Option<&Subband>| a.map_or(0, |b| b.get_or_zero(pr, pc));
        [
            p.get_or_zero(pr, pc),
            p.get_or_zero(pr, pc + 1),
            p.get_or_zero(pr, pc - 1),
            p.get_or_zero(pr + 1, pc),
            p.get_or_zero(pr - 1, pc),
            own(-1, 0),
            own(-1, 1),
            own(-1, -1),
            own(0, -1),
            aunt(self.aunts[0]),
            aunt(self.aunts[1]),
        ]
    }

    pub(crate) fn dims(&self) -> (usize, usize) {
        (self.rows, self.cols)
    }
}

/// Context rows and dependent values of detail band `band` (coding-order
/// index) of `pyr`.
pub fn extract_context(pyr: &SubbandPyramid, band: usize) -> Result<ContextMatrix> {
    let src = ContextSource::new(pyr.layout(), pyr.bands(), band)?;
    let current = &pyr.band(band).coeffs;
    let (rows, cols) = src.dims();
    let mut out = Vec::with_capacity(rows * cols);
    for r in 0..rows {
        for c in 0..cols {
            out.push(src.row(current, r, c));
        }
    }
    Ok(ContextMatrix {
        band,
        rows: out,
        dependent: current.clone(),
    })
}
