//! The thematic-role-to-sort mapping used when declaring story entities.
//!
//! Every referent in a narrative plays one or more thematic roles (Theme,
//! Destination, Recipient, ...). Each role maps to one of four parent sorts,
//! and a referent is declared under the highest-priority sort among the roles
//! it plays: living_entity before place before spatial_entity before entity.

use std::collections::BTreeMap;

/// Parent sorts from highest to lowest priority.
const PRIORITY: [&str; 4] = ["living_entity", "place", "spatial_entity", "entity"];

const LIVING_ENTITY_ROLES: [&str; 12] = [
    "Actor",
    "Agent",
    "Beneficiary",
    "Cause",
    "Co-Agent",
    "Co-Theme",
    "Recipient",
    "Experiencer",
    "Participant",
    "Patient",
    "Theme",
    "Undergoer",
];

const PLACE_ROLES: [&str; 2] = ["Location", "Place"];

// "Initity_location" is a historical misspelling of Initial_location; both
// are accepted so older discourse files keep working.
const SPATIAL_ENTITY_ROLES: [&str; 4] =
    ["Destination", "Initial_location", "Initity_location", "Source"];

const ENTITY_ROLES: [&str; 17] = [
    "Instrument",
    "Material",
    "Pivot",
    "Product",
    "Duration",
    "Stimulus",
    "Time",
    "Extent",
    "Trajectory",
    "Initial_time",
    "Topic",
    "Value",
    "Goal",
    "Result",
    "Attribute",
    "Final_time",
    "Frequency",
];

#[derive(Debug, Clone)]
pub struct RoleSortTable {
    /// Normalized role name to parent sort.
    role_to_sort: BTreeMap<String, &'static str>,
}

/// Role names are matched case-insensitively, with hyphens and spaces
/// treated as underscores: "Co-Agent" and "co_agent" are the same role.
pub fn normalize_role(role: &str) -> String {
    role.chars()
        .map(|c| match c {
            '-' | ' ' => '_',
            _ => c.to_ascii_lowercase(),
        })
        .collect()
}

impl RoleSortTable {
    pub fn standard() -> Self {
        let mut role_to_sort = BTreeMap::new();
        let groups: [(&[&str], &'static str); 4] = [
            (&LIVING_ENTITY_ROLES, "living_entity"),
            (&PLACE_ROLES, "place"),
            (&SPATIAL_ENTITY_ROLES, "spatial_entity"),
            (&ENTITY_ROLES, "entity"),
        ];
        for (roles, sort) in groups {
            for role in roles {
                role_to_sort.insert(normalize_role(role), sort);
            }
        }
        Self { role_to_sort }
    }

    pub fn sort_for_role(&self, role: &str) -> Option<&'static str> {
        self.role_to_sort.get(&normalize_role(role)).copied()
    }

    /// The sort a referent is declared under, given every role it plays.
    /// Unknown roles and the empty set fall back to plain entity.
    pub fn parent_sort_for_roles<'a, I>(&self, roles: I) -> &'static str
    where
        I: IntoIterator<Item = &'a str>,
    {
        let mut best = PRIORITY.len() - 1;
        for role in roles {
            if let Some(sort) = self.sort_for_role(role) {
                let rank = PRIORITY.iter().position(|s| *s == sort).unwrap();
                best = best.min(rank);
            }
        }
        PRIORITY[best]
    }
}

impl Default for RoleSortTable {
    fn default() -> Self {
        Self::standard()
    }
}
