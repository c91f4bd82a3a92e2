use num_bigint::BigUint;

use crate::error::{Error, Result};

/// Size limits for operations whose cost grows with the group order.
///
/// Every operation that enumerates group elements (nondegeneracy scans,
/// isomorphism search, modular data assembly) checks the module order against
/// `max_module_order` first. Enumeration of modules of a given order is
/// bounded separately by `max_enum_order`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Guards {
    pub max_module_order: u64,
    pub max_enum_order: u64,
}

impl Default for Guards {
    fn default() -> Self {
        Guards {
            max_module_order: 4096,
            max_enum_order: 256,
        }
    }
}

impl Guards {
    pub fn with_module_order(limit: u64) -> Self {
        Guards {
            max_module_order: limit,
            ..Guards::default()
        }
    }

    pub fn check_module_order(&self, order: &BigUint) -> Result<u64> {
        match u64::try_from(order) {
            Ok(n) if n <= self.max_module_order => Ok(n),
            _ => Err(Error::SizeGuardExceeded {
                order: order.to_string(),
                limit: self.max_module_order,
            }),
        }
    }

    pub fn check_enum_order(&self, order: u64) -> Result<u64> {
        if order <= self.max_enum_order {
            Ok(order)
        } else {
            Err(Error::SizeGuardExceeded {
                order: order.to_string(),
                limit: self.max_enum_order,
            })
        }
    }
}
