//! Historical place hierarchy with validity periods and coordinates.

use std::collections::{BTreeMap, HashMap};
use std::io::Read;

use serde::{Deserialize, Serialize};

use crate::error::{invalid, Error, Result};

pub const EARTH_RADIUS_KM: f64 = 6371.0088;
pub const DEFAULT_NEAR_KM: f64 = 30.0;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Coordinates {
    pub lat: f64,
    pub lon: f64,
}

impl Coordinates {
    pub fn new(lat: f64, lon: f64) -> Result<Self> {
        if !(-90.0..=90.0).contains(&lat) || !(-180.0..=180.0).contains(&lon) {
            return Err(invalid(format!("coordinates ({lat}, {lon}) out of range")));
        }
        Ok(Coordinates { lat, lon })
    }
}

/// Great-circle distance on the mean-radius sphere.
pub fn haversine_km(a: Coordinates, b: Coordinates) -> f64 {
    let (p1, p2) = (a.lat.to_radians(), b.lat.to_radians());
    let dp = p2 - p1;
    let dl = (b.lon - a.lon).to_radians();
    let h = (dp / 2.0).sin().powi(2) + p1.cos() * p2.cos() * (dl / 2.0).sin().powi(2);
    2.0 * EARTH_RADIUS_KM * h.sqrt().min(1.0).asin()
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Place {
    pub place_id: String,
    pub name: String,
    #[serde(default)]
    pub variants: Vec<String>,
    #[serde(default)]
    pub parent: Option<String>,
    #[serde(default)]
    pub valid_period: Option<(i32, i32)>,
    #[serde(default)]
    pub coords: Option<Coordinates>,
}

impl Place {
    pub fn new(place_id: impl Into<String>, name: impl Into<String>) -> Self {
        Place {
            place_id: place_id.into(),
            name: name.into(),
            variants: Vec::new(),
            parent: None,
            valid_period: None,
            coords: None,
        }
    }

    pub fn with_parent(mut self, parent: impl Into<String>) -> Self {
        self.parent = Some(parent.into());
        self
    }

    pub fn with_period(mut self, start: i32, end: i32) -> Self {
        self.valid_period = Some((start, end));
        self
    }

    pub fn with_coords(mut self, lat: f64, lon: f64) -> Self {
        self.coords = Some(Coordinates { lat, lon });
        self
    }

    pub fn with_variant(mut self, v: impl Into<String>) -> Self {
        self.variants.push(v.into());
        self
    }

    pub fn valid_in(&self, year: i32) -> bool {
        self.valid_period.map_or(true, |(s, e)| s <= year && year <= e)
    }

    pub fn names(&self) -> impl Iterator<Item = &str> {
        std::iter::once(self.name.as_str()).chain(self.variants.iter().map(String::as_str))
    }
}

/// How place `a` relates to place `b`. `ContainedBy(1)`: `b` is `a`'s parent.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "relation", rename_all = "snake_case")]
pub enum PlaceRelation {
    Identical,
    Contains { levels: u32 },
    ContainedBy { levels: u32 },
    Sibling,
    Near { km: f64 },
    Unrelated,
}

impl PlaceRelation {
    pub fn inverse(self) -> Self {
        match self {
            PlaceRelation::Contains { levels } => PlaceRelation::ContainedBy { levels },
            PlaceRelation::ContainedBy { levels } => PlaceRelation::Contains { levels },
            other => other,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Gazetteer {
    places: Vec<Place>,
    by_id: HashMap<String, usize>,
    by_name: HashMap<String, Vec<usize>>,
}

#[derive(Debug, Deserialize)]
struct Row {
    place_id: String,
    name: String,
    #[serde(default)]
    variants: String,
    #[serde(default)]
    parent_id: String,
    start_year: Option<i32>,
    end_year: Option<i32>,
    lat: Option<f64>,
    lon: Option<f64>,
}

impl Gazetteer {
    /// Validates ids, parents, periods and coordinates, and rejects parent cycles.
    pub fn new(places: Vec<Place>) -> Result<Self> {
        let mut by_id = HashMap::new();
        for (i, p) in places.iter().enumerate() {
            if p.place_id.is_empty() || p.name.is_empty() {
                return Err(Error::Schema(format!("place {} needs an id and a name", i + 1)));
            }
            if by_id.insert(p.place_id.clone(), i).is_some() {
                return Err(Error::Schema(format!("duplicate place id {}", p.place_id)));
            }
            if let Some((s, e)) = p.valid_period {
                if s > e {
                    return Err(Error::Schema(format!("place {}: period {s}-{e} reversed", p.place_id)));
                }
            }
            if let Some(c) = p.coords {
                Coordinates::new(c.lat, c.lon)
                    .map_err(|_| Error::Schema(format!("place {}: coordinates out of range", p.place_id)))?;
            }
        }
        for p in &places {
            if let Some(parent) = &p.parent {
                if !by_id.contains_key(parent) {
                    return Err(Error::Schema(format!("place {}: unknown parent {parent}", p.place_id)));
                }
            }
        }
        // 0 unvisited, 1 on stack, 2 done
        let mut state = vec![0u8; places.len()];
        for start in 0..places.len() {
            let mut path = Vec::new();
            let mut cur = Some(start);
            while let Some(i) = cur {
                match state[i] {
                    2 => break,
                    1 => {
                        return Err(Error::Schema(format!(
                            "parent cycle through {}",
                            places[i].place_id
                        )))
                    }
                    _ => {}
                }
                state[i] = 1;
                path.push(i);
                cur = places[i].parent.as_ref().map(|p| by_id[p]);
            }
            for i in path {
                state[i] = 2;
            }
        }
        let mut by_name: HashMap<String, Vec<usize>> = HashMap::new();
        for (i, p) in places.iter().enumerate() {
            for n in p.names() {
                let e = by_name.entry(n.to_string()).or_default();
                if !e.contains(&i) {
                    e.push(i);
                }
            }
        }
        Ok(Gazetteer {
            places,
            by_id,
            by_name,
        })
    }

    /// Tab-separated: `place_id name variants parent_id start_year end_year lat lon`,
    /// variants separated by `|`, empty cells for missing values.
    pub fn load_tsv(r: impl Read) -> Result<Self> {
        let mut rdr = csv::ReaderBuilder::new()
            .delimiter(b'\t')
            .flexible(false)
            .from_reader(r);
        let mut places = Vec::new();
        for (i, rec) in rdr.deserialize::<Row>().enumerate() {
            let row = rec.map_err(|e| Error::Schema(format!("gazetteer row {}: {e}", i + 1)))?;
            let valid_period = match (row.start_year, row.end_year) {
                (Some(s), Some(e)) => Some((s, e)),
                (None, None) => None,
                _ => return Err(Error::Schema(format!("gazetteer row {}: half-open period", i + 1))),
            };
            let coords = match (row.lat, row.lon) {
                (Some(lat), Some(lon)) => Some(Coordinates { lat, lon }),
                (None, None) => None,
                _ => return Err(Error::Schema(format!("gazetteer row {}: lat without lon", i + 1))),
            };
            places.push(Place {
                place_id: row.place_id,
                name: row.name,
                variants: row
                    .variants
                    .split('|')
                    .map(str::trim)
                    .filter(|s| !s.is_empty())
                    .map(str::to_string)
                    .collect(),
                parent: Some(row.parent_id).filter(|p| !p.is_empty()),
                valid_period,
                coords,
            });
        }
        Gazetteer::new(places)
    }

    /// Inverse of [`Gazetteer::load_tsv`].
    pub fn write_tsv(&self, w: impl std::io::Write) -> Result<()> {
        let mut wtr = csv::WriterBuilder::new().delimiter(b'\t').from_writer(w);
        wtr.write_record(["place_id", "name", "variants", "parent_id", "start_year", "end_year", "lat", "lon"])?;
        let opt = |x: Option<String>| x.unwrap_or_default();
        for p in &self.places {
            wtr.write_record([
                p.place_id.clone(),
                p.name.clone(),
                p.variants.join("|"),
                opt(p.parent.clone()),
                opt(p.valid_period.map(|x| x.0.to_string())),
                opt(p.valid_period.map(|x| x.1.to_string())),
                opt(p.coords.map(|c| c.lat.to_string())),
                opt(p.coords.map(|c| c.lon.to_string())),
            ])?;
        }
        wtr.flush()?;
        Ok(())
    }

    pub fn len(&self) -> usize {
        self.places.len()
    }

    pub fn is_empty(&self) -> bool {
        self.places.is_empty()
    }

    pub fn places(&self) -> &[Place] {
        &self.places
    }

    pub fn get(&self, id: &str) -> Option<&Place> {
        self.by_id.get(id).map(|&i| &self.places[i])
    }

    /// All places known by `name`, optionally valid in `asof`; never collapsed.
    pub fn resolve_name(&self, name: &str, asof: Option<i32>) -> Vec<&Place> {
        let mut out: Vec<&Place> = self
            .by_name
            .get(name)
            .into_iter()
            .flatten()
            .map(|&i| &self.places[i])
            .filter(|p| asof.map_or(true, |y| p.valid_in(y)))
            .collect();
        out.sort_by(|a, b| a.place_id.cmp(&b.place_id));
        out
    }

    /// Parent chain, nearest first.
    pub fn ancestors(&self, id: &str) -> Vec<&Place> {
        let mut out = Vec::new();
        let mut cur = self.get(id).and_then(|p| p.parent.as_deref());
        while let Some(pid) = cur {
            let p = &self.places[self.by_id[pid]];
            out.push(p);
            cur = p.parent.as_deref();
        }
        out
    }

    fn depth_below(&self, descendant: &Place, ancestor: &Place) -> Option<u32> {
        self.ancestors(&descendant.place_id)
            .iter()
            .position(|p| p.place_id == ancestor.place_id)
            .map(|i| i as u32 + 1)
    }

    /// Identical > containment > sibling > near > unrelated. Places whose
    /// validity periods do not intersect can only be near or unrelated.
    pub fn classify_relation(&self, a: &Place, b: &Place, near_km: f64) -> PlaceRelation {
        if a.place_id == b.place_id {
            return PlaceRelation::Identical;
        }
        let disjoint = match (a.valid_period, b.valid_period) {
            (Some((s1, e1)), Some((s2, e2))) => e1 < s2 || e2 < s1,
            _ => false,
        };
        if !disjoint {
            if let Some(levels) = self.depth_below(b, a) {
                return PlaceRelation::Contains { levels };
            }
            if let Some(levels) = self.depth_below(a, b) {
                return PlaceRelation::ContainedBy { levels };
            }
            if a.parent.is_some() && a.parent == b.parent {
                return PlaceRelation::Sibling;
            }
        }
        if let (Some(p), Some(q)) = (a.coords, b.coords) {
            let km = haversine_km(p, q);
            if km <= near_km {
                return PlaceRelation::Near { km };
            }
        }
        PlaceRelation::Unrelated
    }

    pub fn distance_km(&self, a: &Place, b: &Place) -> Result<f64> {
        match (a.coords, b.coords) {
            (Some(p), Some(q)) => Ok(haversine_km(p, q)),
            _ => Err(invalid(format!(
                "missing coordinates for {} or {}",
                a.place_id, b.place_id
            ))),
        }
    }

    /// Places grouped by parent id (roots under the empty string).
    pub fn children(&self) -> BTreeMap<String, Vec<&str>> {
        let mut m: BTreeMap<String, Vec<&str>> = BTreeMap::new();
        for p in &self.places {
            m.entry(p.parent.clone().unwrap_or_default())
                .or_default()
                .push(&p.place_id);
        }
        m
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    pub(crate) fn fixture() -> Gazetteer {
        Gazetteer::new(vec![
            Place::new("gd", "廣東").with_coords(23.13, 113.26),
            Place::new("hz", "惠州府").with_parent("gd").with_period(1368, 1911).with_coords(23.08, 114.41),
            Place::new("lc", "龍川縣").with_parent("hz").with_coords(24.10, 115.26),
            Place::new("hc", "惠川縣").with_parent("hz"),
            Place::new("zj", "浙江"),
            Place::new("cz", "處州府").with_parent("zj").with_period(1368, 1911),
            Place::new("yn", "宜寧縣").with_parent("cz"),
            Place::new("yn2", "宜寧縣").with_period(1912, 1949),
            Place::new("qy", "清苑縣").with_period(1644, 1911).with_variant("清苑"),
        ])
        .unwrap()
    }

    #[test]
    fn relations_from_the_record() {
        let g = fixture();
        let (lc, hc) = (g.get("lc").unwrap(), g.get("hc").unwrap());
        assert_eq!(g.classify_relation(lc, hc, DEFAULT_NEAR_KM), PlaceRelation::Sibling);
        let (yn, cz) = (g.get("yn").unwrap(), g.get("cz").unwrap());
        assert_eq!(g.classify_relation(yn, cz, DEFAULT_NEAR_KM), PlaceRelation::ContainedBy { levels: 1 });
        assert_eq!(g.classify_relation(cz, yn, DEFAULT_NEAR_KM), PlaceRelation::Contains { levels: 1 });
        let gd = g.get("gd").unwrap();
        assert_eq!(g.classify_relation(lc, gd, DEFAULT_NEAR_KM), PlaceRelation::ContainedBy { levels: 2 });
        assert_eq!(g.classify_relation(lc, lc, DEFAULT_NEAR_KM), PlaceRelation::Identical);
        assert_eq!(g.classify_relation(lc, cz, DEFAULT_NEAR_KM), PlaceRelation::Unrelated);
        assert!(matches!(g.classify_relation(lc, g.get("hz").unwrap(), 1.0), PlaceRelation::ContainedBy { levels: 1 }));
    }

    #[test]
    fn period_mismatch_degrades() {
        let g = Gazetteer::new(vec![
            Place::new("p", "府").with_period(1368, 1643).with_coords(30.0, 120.0),
            Place::new("c", "縣").with_parent("p").with_period(1700, 1800).with_coords(30.1, 120.0),
        ])
        .unwrap();
        let (p, c) = (g.get("p").unwrap(), g.get("c").unwrap());
        assert!(matches!(g.classify_relation(c, p, 30.0), PlaceRelation::Near { .. }));
        assert_eq!(g.classify_relation(c, p, 5.0), PlaceRelation::Unrelated);
    }

    #[test]
    fn resolution() {
        let g = fixture();
        assert_eq!(g.resolve_name("龍川縣", None).len(), 1);
        assert_eq!(g.resolve_name("宜寧縣", None).len(), 2);
        assert_eq!(g.resolve_name("宜寧縣", Some(1500)).len(), 1);
        assert!(g.resolve_name("清苑", Some(1500)).is_empty());
        assert_eq!(g.resolve_name("清苑", Some(1700))[0].place_id, "qy");
        assert!(g.resolve_name("無此地", None).is_empty());
    }

    #[test]
    fn load_errors() {
        let header = "place_id\tname\tvariants\tparent_id\tstart_year\tend_year\tlat\tlon\n";
        let ok = format!("{header}a\t甲\t\t\t\t\t\t\nb\t乙\t乙地|乙縣\ta\t1368\t1644\t30\t120\n");
        let g = Gazetteer::load_tsv(ok.as_bytes()).unwrap();
        assert_eq!(g.resolve_name("乙地", None)[0].place_id, "b");
        let mut buf = Vec::new();
        fixture().write_tsv(&mut buf).unwrap();
        assert_eq!(Gazetteer::load_tsv(&buf[..]).unwrap(), fixture());
        let cycle = format!("{header}a\t甲\t\tb\t\t\t\t\nb\t乙\t\ta\t\t\t\t\n");
        assert!(Gazetteer::load_tsv(cycle.as_bytes()).is_err());
        let orphan = format!("{header}a\t甲\t\tz\t\t\t\t\n");
        assert!(Gazetteer::load_tsv(orphan.as_bytes()).is_err());
        let bad_lat = format!("{header}a\t甲\t\t\t\t\t95\t10\n");
        assert!(Gazetteer::load_tsv(bad_lat.as_bytes()).is_err());
    }

    #[test]
    fn haversine_fixed_points() {
        let p = Coordinates { lat: 10.0, lon: 20.0 };
        assert_eq!(haversine_km(p, p), 0.0);
        let anti = haversine_km(Coordinates { lat: 0.0, lon: 0.0 }, Coordinates { lat: 0.0, lon: 180.0 });
        assert!((anti - 20015.1).abs() < 0.1);
    }

    fn coord() -> impl Strategy<Value = Coordinates> {
        (-90.0f64..=90.0, -180.0f64..=180.0).prop_map(|(lat, lon)| Coordinates { lat, lon })
    }

    proptest! {
        #[test]
        fn haversine_metric(a in coord(), b in coord(), c in coord()) {
            let ab = haversine_km(a, b);
            prop_assert!(ab >= 0.0);
            prop_assert!((ab - haversine_km(b, a)).abs() < 1e-9);
            prop_assert!(ab <= haversine_km(a, c) + haversine_km(c, b) + 1e-9);
        }

        #[test]
        fn relation_inverse_consistent(i in 0usize..9, j in 0usize..9) {
            let g = fixture();
            let (a, b) = (&g.places()[i], &g.places()[j]);
            prop_assert_eq!(g.classify_relation(a, b, 100.0), g.classify_relation(b, a, 100.0).inverse());
        }
    }
}
