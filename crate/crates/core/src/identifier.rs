use std::fmt;

/// Index of an adjoint in the tape's adjoint vector.
///
/// Zero marks a passive value; every active identifier is at least one.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, PartialOrd, Ord, Hash)]
#[repr(transparent)]
pub struct Identifier(u32);

impl Identifier {
    pub const PASSIVE: Identifier = Identifier(0);

    #[inline]
    pub const fn new(raw: u32) -> Self {
        Identifier(raw)
    }

    #[inline]
    pub const fn raw(self) -> u32 {
        self.0
    }

    #[inline]
    pub const fn index(self) -> usize {
        self.0 as usize
    }

    #[inline]
    pub const fn is_active(self) -> bool {
        self.0 != 0
    }

    #[inline]
    pub(crate) fn to_le_bytes(self) -> [u8; 4] {
        self.0.to_le_bytes()
    }
}

impl fmt::Display for Identifier {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "#{}", self.0)
    }
}

impl From<u32> for Identifier {
    fn from(raw: u32) -> Self {
        Identifier(raw)
    }
}
