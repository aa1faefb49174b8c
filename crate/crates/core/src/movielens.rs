//! MovieLens-100k ingestion: users become items, popular movies platforms.

use std::collections::{BTreeMap, HashMap};
use std::fs;
use std::path::Path;

use crate::cost::CostSpec;
use crate::error::IoError;
use crate::instance::{CostModel, DeclaredStructure, Edge, GroupFamily, Instance};

/// Age bracket names in group order.
pub const AGE_GROUPS: [&str; 5] = ["15-29", "30-44", "45-59", "60+", "<15"];

/// Bracket index for an age. Ages of 75 and above share the 60-74 bracket.
pub fn age_group(age: u32) -> usize {
    match age {
        0..=14 => 4,
        15..=29 => 0,
        30..=44 => 1,
        45..=59 => 2,
        _ => 3,
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct MovieLensInstance {
    pub instance: Instance,
    /// Original user id of each item.
    pub users: Vec<u32>,
    /// Original movie id of each platform.
    pub movies: Vec<u32>,
    /// Bracket name of each (nonempty) group.
    pub group_labels: Vec<&'static str>,
    /// Lines skipped as malformed, over both files.
    pub skipped_rows: usize,
}

fn read(path: &Path) -> Result<String, IoError> {
    fs::read_to_string(path).map_err(|source| IoError::Io {
        path: path.display().to_string(),
        source,
    })
}

fn parse_ratings(text: &str, skipped: &mut usize) -> Vec<(u32, u32, u8)> {
    let mut out = Vec::new();
    for line in text.lines() {
        if line.trim().is_empty() {
            continue;
        }
        let f: Vec<&str> = line.split('\t').collect();
        let parsed = (f.len() >= 3)
            .then(|| {
                Some((
                    f[0].trim().parse::<u32>().ok()?,
                    f[1].trim().parse::<u32>().ok()?,
                    f[2].trim().parse::<u8>().ok()?,
                ))
            })
            .flatten();
        match parsed {
            Some(r) if (1..=5).contains(&r.2) => out.push(r),
            _ => *skipped += 1,
        }
    }
    out
}

fn parse_users(text: &str, skipped: &mut usize) -> HashMap<u32, u32> {
    let mut ages = HashMap::new();
    for line in text.lines() {
        if line.trim().is_empty() {
            continue;
        }
        let f: Vec<&str> = line.split('|').collect();
        let parsed = (f.len() >= 2)
            .then(|| {
                Some((
                    f[0].trim().parse::<u32>().ok()?,
                    f[1].trim().parse::<u32>().ok()?,
                ))
            })
            .flatten();
        match parsed {
            Some((id, age)) => {
                ages.insert(id, age);
            }
            None => *skipped += 1,
        }
    }
    ages
}

/// Builds the instance from a ratings file (`user\tmovie\trating\ttime`) and
/// a users file (`user|age|gender|occupation|zip`). The `top_k` most rated
/// movies are kept, ties going to the lower movie id. Users without a rating
/// among them, or without a users-file entry, are dropped. `ell` is 0.
pub fn ingest_movielens(
    data_path: &Path,
    user_path: &Path,
    top_k: usize,
    cost: CostSpec,
) -> Result<MovieLensInstance, IoError> {
    let mut skipped = 0;
    let ratings = parse_ratings(&read(data_path)?, &mut skipped);
    let ages = parse_users(&read(user_path)?, &mut skipped);
    build(&ratings, &ages, top_k, cost, skipped)
}

/// [`ingest_movielens`] on already parsed rows.
pub fn build(
    ratings: &[(u32, u32, u8)],
    ages: &HashMap<u32, u32>,
    top_k: usize,
    cost: CostSpec,
    mut skipped: usize,
) -> Result<MovieLensInstance, IoError> {
    if top_k == 0 {
        return Err(IoError::Empty("top_k must be positive".into()));
    }
    let mut counts: BTreeMap<u32, usize> = BTreeMap::new();
    for &(_, movie, _) in ratings {
        *counts.entry(movie).or_default() += 1;
    }
    let mut ranked: Vec<(u32, usize)> = counts.into_iter().collect();
    ranked.sort_by(|a, b| b.1.cmp(&a.1).then(a.0.cmp(&b.0)));
    ranked.truncate(top_k);
    if ranked.is_empty() {
        return Err(IoError::Empty("no ratings to select movies from".into()));
    }
    let movies: Vec<u32> = ranked.iter().map(|&(m, _)| m).collect();
    let platform: HashMap<u32, usize> = movies.iter().enumerate().map(|(p, &m)| (m, p)).collect();

    // (user, platform) -> rating, first occurrence wins
    let mut kept: BTreeMap<(u32, usize), u8> = BTreeMap::new();
    for &(user, movie, r) in ratings {
        let Some(&p) = platform.get(&movie) else {
            continue;
        };
        if !ages.contains_key(&user) {
            skipped += 1;
            continue;
        }
        kept.entry((user, p)).or_insert(r);
    }
    let mut users: Vec<u32> = kept.keys().map(|&(u, _)| u).collect();
    users.dedup();
    if users.is_empty() {
        return Err(IoError::Empty("no user rated the selected movies".into()));
    }
    let item: HashMap<u32, usize> = users.iter().enumerate().map(|(i, &u)| (u, i)).collect();
    let edges: Vec<Edge> = kept
        .iter()
        .map(|(&(u, p), &r)| Edge::new(item[&u], p, r as f64))
        .collect();

    let mut brackets: Vec<Vec<usize>> = vec![Vec::new(); AGE_GROUPS.len()];
    for (i, u) in users.iter().enumerate() {
        brackets[age_group(ages[u])].push(i);
    }
    let mut sets = Vec::new();
    let mut group_labels = Vec::new();
    for (g, set) in brackets.into_iter().enumerate() {
        if !set.is_empty() {
            sets.push(set);
            group_labels.push(AGE_GROUPS[g]);
        }
    }

    Ok(MovieLensInstance {
        instance: Instance {
            n: users.len(),
            m: movies.len(),
            edges,
            ell: 0.0,
            groups: GroupFamily::new(DeclaredStructure::Disjoint, sets),
            costs: CostModel::uniform(cost),
        },
        users,
        movies,
        group_labels,
        skipped_rows: skipped,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::instance::validate_instance;

    fn ages() -> HashMap<u32, u32> {
        [(1, 24), (2, 53), (3, 10), (4, 80)].into_iter().collect()
    }

    #[test]
    fn brackets() {
        assert_eq!(age_group(14), 4);
        assert_eq!(age_group(15), 0);
        assert_eq!(age_group(44), 1);
        assert_eq!(age_group(59), 2);
        assert_eq!(age_group(74), 3);
        assert_eq!(age_group(80), 3);
    }

    #[test]
    fn top_one_single_edge() {
        let ratings = [(1, 10, 4), (2, 20, 3)];
        let ml = build(&ratings, &ages(), 1, CostSpec::quadratic(), 0).unwrap();
        // tie on count goes to the lower id
        assert_eq!(ml.movies, vec![10]);
        assert_eq!(ml.instance.edges, vec![Edge::new(0, 0, 4.0)]);
        assert_eq!(ml.users, vec![1]);
        validate_instance(ml.instance).unwrap();
    }

    #[test]
    fn selection_by_count_and_groups() {
        let ratings = [
            (1, 20, 5),
            (2, 20, 1),
            (3, 20, 2),
            (4, 10, 3),
            (3, 30, 3),
            (4, 30, 4),
        ];
        let ml = build(&ratings, &ages(), 2, CostSpec::quadratic(), 0).unwrap();
        assert_eq!(ml.movies, vec![20, 30]);
        assert_eq!(ml.users, vec![1, 2, 3, 4]);
        assert_eq!(ml.instance.edges.len(), 5);
        assert_eq!(ml.group_labels, vec!["15-29", "45-59", "60+", "<15"]);
        let v = validate_instance(ml.instance).unwrap();
        assert_eq!(v.structure().name(), "disjoint");
    }

    #[test]
    fn malformed_rows_are_counted() {
        let mut skipped = 0;
        let r = parse_ratings("1\t2\t3\t0\nbad line\n1\t2\t9\t0\n\n", &mut skipped);
        assert_eq!(r, vec![(1, 2, 3)]);
        assert_eq!(skipped, 2);
        let u = parse_users("1|24|M|x|1\n2|old|F|y|2\n", &mut skipped);
        assert_eq!(u.len(), 1);
        assert_eq!(skipped, 3);
    }

    #[test]
    fn empty_selection_errors() {
        assert!(build(&[], &ages(), 3, CostSpec::quadratic(), 0).is_err());
        assert!(build(&[(9, 1, 3)], &ages(), 3, CostSpec::quadratic(), 0).is_err());
    }
}
