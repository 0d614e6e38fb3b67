use std::fmt;

/// The eleven causal neighbours a detail coefficient may be predicted from.
/// Declaration order is the fixed role order used for masks, coefficient
/// serialization and tie-breaking.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum PredictorRole {
    Parent,
    ParentEast,
    ParentWest,
    ParentSouth,
    ParentNorth,
    North,
    NorthEast,
    NorthWest,
    West,
    Aunt1,
    Aunt2,
}

pub const ROLE_COUNT: usize = 11;

impl PredictorRole {
    pub const ALL: [PredictorRole; ROLE_COUNT] = [
        PredictorRole::Parent,
        PredictorRole::ParentEast,
        PredictorRole::ParentWest,
        PredictorRole::ParentSouth,
        PredictorRole::ParentNorth,
        PredictorRole::North,
        PredictorRole::NorthEast,
        PredictorRole::NorthWest,
        PredictorRole::West,
        PredictorRole::Aunt1,
        PredictorRole::Aunt2,
    ];

    pub fn index(self) -> usize {
        self as usize
    }

    pub fn name(self) -> &'static str {
        match self {
            PredictorRole::Parent => "Parent",
            PredictorRole::ParentEast => "ParentEast",
            PredictorRole::ParentWest => "ParentWest",
            PredictorRole::ParentSouth => "ParentSouth",
            PredictorRole::ParentNorth => "ParentNorth",
            PredictorRole::North => "North",
            PredictorRole::NorthEast => "NorthEast",
            PredictorRole::NorthWest => "NorthWest",
            PredictorRole::West => "West",
            PredictorRole::Aunt1 => "Aunt1",
            PredictorRole::Aunt2 => "Aunt2",
        }
    }
}

impl fmt::Display for PredictorRole {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

/// Set of roles as an 11-bit mask; bit `i` is `PredictorRole::ALL[i]`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default)]
pub struct RoleMask(u16);

impl RoleMask {
    pub const EMPTY: RoleMask = RoleMask(0);
    pub const FULL: RoleMask = RoleMask((1 << ROLE_COUNT) - 1);

    /// Accepts only masks whose high five bits are clear.
    pub fn from_bits(bits: u16) -> Option<Self> {
        (bits & !Self::FULL.0 == 0).then_some(RoleMask(bits))
    }

    pub fn bits(self) -> u16 {
        self.0
    }

    pub fn contains(self, role: PredictorRole) -> bool {
        self.0 & (1 << role.index()) != 0
    }

    pub fn with(self, role: PredictorRole) -> Self {
        RoleMask(self.0 | (1 << role.index()))
    }

    pub fn count(self) -> usize {
        self.0.count_ones() as usize
    }

    pub fn is_empty(self) -> bool {
        self.0 == 0
    }

    /// Selected roles in role order.
    pub fn roles(self) -> impl Iterator<Item = PredictorRole> {
        PredictorRole::ALL.into_iter().filter(move |r| self.contains(*r))
    }
}

impl FromIterator<PredictorRole> for RoleMask {
    fn from_iter<I: IntoIterator<Item = PredictorRole>>(iter: I) -> Self {
        iter.into_iter().fold(RoleMask::EMPTY, RoleMask::with)
    }
}

impl fmt::Display for RoleMask {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_empty() {
            return f.write_str("{}");
        }
        let names: Vec<&str> = self.roles().map(|r| r.name()).collect();
        write!(f, "{{{}}}", names.join("+"))
    }
}
