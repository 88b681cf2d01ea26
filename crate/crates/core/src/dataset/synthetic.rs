//! Synthetic records in the NSL-KDD schema.
//!
//! Used by tests and the demo pipeline when the real KDDTrain+ file is not
//! available. Attack names and their relative frequencies follow the
//! published KDDTrain+ composition; feature values come from coarse
//! per-family traffic profiles with a fraction of camouflaged rows that
//! borrow normal traffic statistics. The result has the same column layout,
//! the same label taxonomy and a comparable imbalance, but it is not the
//! real dataset and scores on it say nothing about scores on NSL-KDD.

use std::collections::HashMap;

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, LogNormal};

use super::parse::RawRecord;
use super::schema::FeatureSchema;
use super::taxonomy::{AttackTaxonomy, Category};

/// Rows per attack name in KDDTrain+ (125,973 rows in total).
pub const KDD_TRAIN_PLUS_COMPOSITION: [(&str, usize); 23] = [
    ("normal", 67343),
    ("neptune", 41214),
    ("satan", 3633),
    ("ipsweep", 3599),
    ("portsweep", 2931),
    ("smurf", 2646),
    ("nmap", 1493),
    ("back", 956),
    ("teardrop", 892),
    ("warezclient", 890),
    ("pod", 201),
    ("guess_passwd", 53),
    ("buffer_overflow", 30),
    ("warezmaster", 20),
    ("land", 18),
    ("imap", 11),
    ("rootkit", 10),
    ("loadmodule", 9),
    ("ftp_write", 8),
    ("multihop", 7),
    ("phf", 4),
    ("perl", 3),
    ("spy", 2),
];

const SERVICES: [&str; 66] = [
    "http", "private", "domain_u", "smtp", "ftp_data", "ecr_i", "eco_i", "other", "telnet", "finger",
    "ftp", "auth", "Z39_50", "uucp", "courier", "bgp", "whois", "uucp_path", "iso_tsap", "time",
    "imap4", "nnsp", "vmnet", "urp_i", "domain", "ctf", "csnet_ns", "supdup", "discard", "http_443",
    "daytime", "gopher", "efs", "systat", "link", "exec", "hostnames", "name", "mtp", "echo", "klogin",
    "login", "ldap", "netbios_dgm", "sunrpc", "netbios_ssn", "netstat", "netbios_ns", "kshell",
    "ssh", "nntp", "pop_3", "sql_net", "IRC", "ntp_u", "rje", "remote_job", "pop_2", "X11",
    "printer", "shell", "urh_i", "tim_i", "red_i", "pm_dump", "tftp_u",
];

/// Probability that an attack row borrows normal traffic statistics, per
/// category. Flooding and scanning rarely look like normal sessions; the
/// content-based R2L and U2R families often do.
fn camouflage_rate(category: Category) -> f64 {
    match category {
        Category::Normal => 0.0,
        Category::DoS => 0.005,
        Category::Probe => 0.02,
        Category::R2L => 0.12,
        Category::U2R => 0.15,
    }
}

struct Row<'a> {
    idx: &'a HashMap<&'static str, usize>,
    continuous: Vec<f64>,
    categorical: [String; 3],
}

impl Row<'_> {
    fn set(&mut self, name: &str, v: f64) {
        self.continuous[self.idx[name]] = v;
    }
    fn cat(&mut self, proto: &str, service: &str, flag: &str) {
        self.categorical = [proto.into(), service.into(), flag.into()];
    }
}

fn pick<'a, R: Rng>(rng: &mut R, items: &[(&'a str, f64)]) -> &'a str {
    let total: f64 = items.iter().map(|(_, w)| w).sum();
    let mut u = rng.random::<f64>() * total;
    for (item, w) in items {
        if u < *w {
            return item;
        }
        u -= w;
    }
    items[items.len() - 1].0
}

fn lognormal<R: Rng>(rng: &mut R, median: f64, sigma: f64) -> f64 {
    LogNormal::new(median.ln(), sigma).expect("valid lognormal").sample(rng).round()
}

fn rate<R: Rng>(rng: &mut R, lo: f64, hi: f64) -> f64 {
    (rng.random_range(lo..=hi) * 100.0).round() / 100.0
}

fn normal_traffic<R: Rng>(row: &mut Row<'_>, rng: &mut R) {
    let proto = pick(rng, &[("tcp", 0.82), ("udp", 0.13), ("icmp", 0.05)]);
    let service = match proto {
        "udp" => pick(rng, &[("domain_u", 0.7), ("private", 0.15), ("ntp_u", 0.1), ("other", 0.05)]),
        "icmp" => pick(rng, &[("ecr_i", 0.4), ("eco_i", 0.3), ("urp_i", 0.25), ("tim_i", 0.05)]),
        _ => {
            if rng.random::<f64>() < 0.1 {
                SERVICES[rng.random_range(0..SERVICES.len())]
            } else {
                pick(rng, &[("http", 0.62), ("smtp", 0.12), ("ftp_data", 0.12), ("ftp", 0.04), ("telnet", 0.03), ("private", 0.03), ("other", 0.04)])
            }
        }
    };
    let flag = if proto == "tcp" {
        pick(rng, &[("SF", 0.93), ("REJ", 0.03), ("S0", 0.01), ("RSTO", 0.01), ("S1", 0.01), ("RSTR", 0.01)])
    } else {
        "SF"
    };
    row.cat(proto, service, flag);
    if rng.random::<f64>() < 0.12 {
        row.set("duration", lognormal(rng, 300.0, 1.5));
    }
    let (src, dst) = match service {
        "http" => (lognormal(rng, 230.0, 0.5), lognormal(rng, 1500.0, 1.3)),
        "smtp" => (lognormal(rng, 1000.0, 0.7), lognormal(rng, 330.0, 0.3)),
        "ftp_data" => (lognormal(rng, 900.0, 2.0), if rng.random::<bool>() { 0.0 } else { lognormal(rng, 2000.0, 1.8) }),
        "domain_u" => (lognormal(rng, 44.0, 0.2), lognormal(rng, 100.0, 0.4)),
        _ => (lognormal(rng, 150.0, 1.5), lognormal(rng, 300.0, 2.0)),
    };
    row.set("src_bytes", src);
    row.set("dst_bytes", dst);
    row.set("logged_in", if proto == "tcp" && flag == "SF" { 1.0 } else { 0.0 });
    if rng.random::<f64>() < 0.05 {
        row.set("hot", rng.random_range(1..=4) as f64);
    }
    if service == "ftp" || service == "ftp_data" {
        row.set("is_guest_login", if rng.random::<f64>() < 0.05 { 1.0 } else { 0.0 });
    }
    let count = rng.random_range(1..=25) as f64;
    row.set("count", count);
    row.set("srv_count", (count * rate(rng, 0.5, 1.5)).max(1.0).round());
    if flag == "REJ" {
        row.set("rerror_rate", rate(rng, 0.5, 1.0));
        row.set("srv_rerror_rate", rate(rng, 0.5, 1.0));
    }
    row.set("same_srv_rate", rate(rng, 0.8, 1.0));
    row.set("diff_srv_rate", rate(rng, 0.0, 0.1));
    row.set("srv_diff_host_rate", rate(rng, 0.0, 0.3));
    row.set("dst_host_count", rng.random_range(1..=255) as f64);
    row.set("dst_host_srv_count", rng.random_range(20..=255) as f64);
    row.set("dst_host_same_srv_rate", rate(rng, 0.6, 1.0));
    row.set("dst_host_diff_srv_rate", rate(rng, 0.0, 0.08));
    row.set("dst_host_same_src_port_rate", rate(rng, 0.0, 0.2));
    row.set("dst_host_srv_diff_host_rate", rate(rng, 0.0, 0.1));
    row.set("dst_host_serror_rate", rate(rng, 0.0, 0.03));
    row.set("dst_host_srv_serror_rate", rate(rng, 0.0, 0.02));
    row.set("dst_host_rerror_rate", rate(rng, 0.0, 0.08));
    row.set("dst_host_srv_rerror_rate", rate(rng, 0.0, 0.05));
}

fn flood<R: Rng>(row: &mut Row<'_>, rng: &mut R, syn: bool) {
    let service = if rng.random::<f64>() < 0.5 {
        "private"
    } else {
        SERVICES[rng.random_range(0..SERVICES.len())]
    };
    let flag = if syn { pick(rng, &[("S0", 0.85), ("REJ", 0.12), ("RSTO", 0.03)]) } else { "REJ" };
    row.cat("tcp", service, flag);
    let count = rng.random_range(90..=511) as f64;
    row.set("count", count);
    row.set("srv_count", rng.random_range(1..=30) as f64);
    let (s, r) = if flag == "S0" { (1.0, 0.0) } else { (0.0, 1.0) };
    row.set("serror_rate", s);
    row.set("srv_serror_rate", s);
    row.set("rerror_rate", r);
    row.set("srv_rerror_rate", r);
    row.set("same_srv_rate", rate(rng, 0.0, 0.12));
    row.set("diff_srv_rate", rate(rng, 0.04, 0.1));
    row.set("dst_host_count", 255.0);
    row.set("dst_host_srv_count", rng.random_range(1..=30) as f64);
    row.set("dst_host_same_srv_rate", rate(rng, 0.0, 0.12));
    row.set("dst_host_diff_srv_rate", rate(rng, 0.04, 0.1));
    row.set("dst_host_serror_rate", s);
    row.set("dst_host_srv_serror_rate", s);
    row.set("dst_host_rerror_rate", r);
    row.set("dst_host_srv_rerror_rate", r);
}

fn attack_traffic<R: Rng>(row: &mut Row<'_>, rng: &mut R, attack: &str) {
    match attack {
        "neptune" => flood(row, rng, true),
        "smurf" => {
            row.cat("icmp", "ecr_i", "SF");
            row.set("src_bytes", if rng.random::<f64>() < 0.7 { 1032.0 } else { 520.0 });
            let count = rng.random_range(150..=511) as f64;
            row.set("count", count);
            row.set("srv_count", count);
            row.set("same_srv_rate", 1.0);
            row.set("dst_host_count", 255.0);
            row.set("dst_host_srv_count", 255.0);
            row.set("dst_host_same_srv_rate", 1.0);
            row.set("dst_host_same_src_port_rate", 1.0);
        }
        "back" => {
            row.cat("tcp", "http", pick(rng, &[("SF", 0.8), ("RSTR", 0.2)]));
            row.set("duration", rng.random_range(0..=3) as f64);
            row.set("src_bytes", lognormal(rng, 54540.0, 0.02));
            row.set("dst_bytes", lognormal(rng, 8314.0, 0.05));
            row.set("hot", 2.0);
            row.set("num_compromised", 1.0);
            row.set("logged_in", 1.0);
            row.set("count", rng.random_range(1..=20) as f64);
            row.set("srv_count", rng.random_range(1..=20) as f64);
            row.set("same_srv_rate", 1.0);
            row.set("dst_host_count", rng.random_range(50..=255) as f64);
            row.set("dst_host_srv_count", rng.random_range(50..=255) as f64);
            row.set("dst_host_same_srv_rate", 1.0);
        }
        "teardrop" => {
            row.cat("udp", "private", "SF");
            row.set("src_bytes", 28.0);
            row.set("wrong_fragment", 3.0);
            row.set("count", rng.random_range(1..=100) as f64);
            row.set("srv_count", rng.random_range(1..=100) as f64);
            row.set("same_srv_rate", 1.0);
            row.set("dst_host_count", rng.random_range(1..=255) as f64);
            row.set("dst_host_srv_count", rng.random_range(1..=100) as f64);
            row.set("dst_host_same_srv_rate", rate(rng, 0.2, 1.0));
        }
        "pod" => {
            row.cat("icmp", pick(rng, &[("ecr_i", 0.9), ("tim_i", 0.1)]), "SF");
            row.set("src_bytes", 1480.0);
            row.set("wrong_fragment", 1.0);
            row.set("count", rng.random_range(1..=10) as f64);
            row.set("srv_count", rng.random_range(1..=10) as f64);
            row.set("same_srv_rate", 1.0);
            row.set("dst_host_count", rng.random_range(1..=255) as f64);
            row.set("dst_host_srv_count", rng.random_range(1..=50) as f64);
            row.set("dst_host_same_src_port_rate", rate(rng, 0.5, 1.0));
        }
        "land" => {
            row.cat("tcp", pick(rng, &[("finger", 0.3), ("telnet", 0.3), ("private", 0.4)]), "S0");
            row.set("land", 1.0);
            row.set("count", 1.0);
            row.set("srv_count", 1.0);
            row.set("serror_rate", 1.0);
            row.set("srv_serror_rate", 1.0);
            row.set("same_srv_rate", 1.0);
            row.set("dst_host_count", rng.random_range(1..=255) as f64);
            row.set("dst_host_srv_count", rng.random_range(1..=10) as f64);
            row.set("dst_host_serror_rate", rate(rng, 0.5, 1.0));
        }
        "satan" => {
            let proto = pick(rng, &[("tcp", 0.85), ("udp", 0.1), ("icmp", 0.05)]);
            let service = SERVICES[rng.random_range(0..SERVICES.len())];
            let flag = pick(rng, &[("REJ", 0.5), ("SF", 0.2), ("S0", 0.15), ("RSTO", 0.1), ("RSTR", 0.05)]);
            row.cat(proto, service, flag);
            row.set("count", rng.random_range(1..=300) as f64);
            row.set("srv_count", rng.random_range(1..=10) as f64);
            row.set("rerror_rate", rate(rng, 0.4, 1.0));
            row.set("srv_rerror_rate", rate(rng, 0.4, 1.0));
            row.set("same_srv_rate", rate(rng, 0.0, 0.3));
            row.set("diff_srv_rate", rate(rng, 0.3, 1.0));
            row.set("dst_host_count", rng.random_range(1..=255) as f64);
            row.set("dst_host_srv_count", rng.random_range(1..=10) as f64);
            row.set("dst_host_same_srv_rate", rate(rng, 0.0, 0.2));
            row.set("dst_host_diff_srv_rate", rate(rng, 0.4, 1.0));
            row.set("dst_host_rerror_rate", rate(rng, 0.4, 1.0));
            row.set("dst_host_srv_rerror_rate", rate(rng, 0.4, 1.0));
        }
        "ipsweep" => {
            row.cat(pick(rng, &[("icmp", 0.9), ("tcp", 0.1)]), pick(rng, &[("eco_i", 0.85), ("ecr_i", 0.1), ("private", 0.05)]), "SF");
            row.set("src_bytes", if rng.random::<bool>() { 8.0 } else { 18.0 });
            row.set("count", rng.random_range(1..=5) as f64);
            row.set("srv_count", rng.random_range(1..=40) as f64);
            row.set("same_srv_rate", 1.0);
            row.set("srv_diff_host_rate", rate(rng, 0.5, 1.0));
            row.set("dst_host_count", rng.random_range(1..=100) as f64);
            row.set("dst_host_srv_count", rng.random_range(1..=100) as f64);
            row.set("dst_host_same_srv_rate", 1.0);
            row.set("dst_host_same_src_port_rate", 1.0);
            row.set("dst_host_srv_diff_host_rate", rate(rng, 0.3, 1.0));
        }
        "portsweep" => {
            row.cat("tcp", pick(rng, &[("private", 0.8), ("other", 0.2)]), pick(rng, &[("REJ", 0.4), ("RSTR", 0.4), ("RSTOS0", 0.1), ("SH", 0.1)]));
            if rng.random::<f64>() < 0.3 {
                row.set("duration", lognormal(rng, 5000.0, 1.0));
            }
            row.set("count", rng.random_range(1..=3) as f64);
            row.set("srv_count", rng.random_range(1..=3) as f64);
            row.set("rerror_rate", rate(rng, 0.5, 1.0));
            row.set("srv_rerror_rate", rate(rng, 0.5, 1.0));
            row.set("same_srv_rate", rate(rng, 0.5, 1.0));
            row.set("dst_host_count", rng.random_range(1..=255) as f64);
            row.set("dst_host_srv_count", rng.random_range(1..=5) as f64);
            row.set("dst_host_same_srv_rate", rate(rng, 0.0, 0.1));
            row.set("dst_host_diff_srv_rate", rate(rng, 0.0, 0.2));
            row.set("dst_host_same_src_port_rate", 1.0);
            row.set("dst_host_rerror_rate", rate(rng, 0.5, 1.0));
            row.set("dst_host_srv_rerror_rate", rate(rng, 0.5, 1.0));
        }
        "nmap" => {
            let proto = pick(rng, &[("icmp", 0.5), ("tcp", 0.35), ("udp", 0.15)]);
            let (service, flag) = match proto {
                "icmp" => ("eco_i", "SF"),
                "tcp" => ("private", pick(rng, &[("S0", 0.6), ("RSTO", 0.2), ("SH", 0.2)])),
                _ => ("private", "SF"),
            };
            row.cat(proto, service, flag);
            row.set("src_bytes", if proto == "icmp" { 8.0 } else { 0.0 });
            row.set("count", rng.random_range(1..=3) as f64);
            row.set("srv_count", rng.random_range(1..=3) as f64);
            row.set("same_srv_rate", 1.0);
            row.set("dst_host_count", rng.random_range(1..=255) as f64);
            row.set("dst_host_srv_count", rng.random_range(1..=20) as f64);
            row.set("dst_host_same_srv_rate", rate(rng, 0.0, 0.6));
            row.set("dst_host_diff_srv_rate", rate(rng, 0.0, 0.5));
            row.set("dst_host_same_src_port_rate", rate(rng, 0.5, 1.0));
            if flag == "S0" {
                row.set("serror_rate", 1.0);
                row.set("dst_host_serror_rate", rate(rng, 0.3, 1.0));
            }
        }
        "warezclient" | "warezmaster" => {
            normal_traffic(row, rng);
            let service = pick(rng, &[("ftp_data", 0.65), ("ftp", 0.35)]);
            row.cat("tcp", service, "SF");
            row.set("duration", lognormal(rng, if attack == "warezmaster" { 3000.0 } else { 400.0 }, 1.0));
            if attack == "warezmaster" {
                row.set("src_bytes", lognormal(rng, 300.0, 1.0));
                row.set("dst_bytes", lognormal(rng, 5_000_000.0, 0.8));
            } else {
                row.set("src_bytes", lognormal(rng, 200_000.0, 1.3));
                row.set("dst_bytes", lognormal(rng, 100.0, 2.0));
            }
            row.set("hot", rng.random_range(0..=28) as f64);
            row.set("is_guest_login", if rng.random::<f64>() < 0.7 { 1.0 } else { 0.0 });
            row.set("logged_in", 1.0);
            row.set("dst_host_count", rng.random_range(1..=60) as f64);
            row.set("dst_host_srv_count", rng.random_range(1..=60) as f64);
        }
        "guess_passwd" => {
            normal_traffic(row, rng);
            row.cat("tcp", pick(rng, &[("telnet", 0.8), ("pop_3", 0.1), ("imap4", 0.1)]), pick(rng, &[("RSTO", 0.6), ("SF", 0.4)]));
            row.set("duration", rng.random_range(1..=5) as f64);
            row.set("src_bytes", lognormal(rng, 125.0, 0.05));
            row.set("dst_bytes", lognormal(rng, 179.0, 0.05));
            row.set("num_failed_logins", 1.0);
            row.set("logged_in", 0.0);
            row.set("dst_host_srv_count", rng.random_range(1..=40) as f64);
            row.set("dst_host_rerror_rate", rate(rng, 0.3, 1.0));
        }
        "imap" | "ftp_write" | "multihop" | "phf" | "spy" => {
            normal_traffic(row, rng);
            let (service, flag) = match attack {
                "imap" => ("imap4", pick(rng, &[("SF", 0.5), ("S0", 0.3), ("SH", 0.2)])),
                "phf" => ("http", "SF"),
                "spy" => ("telnet", "SF"),
                _ => (pick(rng, &[("ftp", 0.4), ("ftp_data", 0.3), ("telnet", 0.3)]), "SF"),
            };
            row.cat("tcp", service, flag);
            row.set("duration", lognormal(rng, 50.0, 2.0));
            row.set("hot", rng.random_range(1..=6) as f64);
            row.set("num_file_creations", rng.random_range(0..=3) as f64);
            row.set("num_access_files", rng.random_range(0..=2) as f64);
            row.set("logged_in", 1.0);
        }
        "buffer_overflow" | "rootkit" | "loadmodule" | "perl" => {
            normal_traffic(row, rng);
            let proto = if attack == "rootkit" { pick(rng, &[("tcp", 0.7), ("udp", 0.3)]) } else { "tcp" };
            let service = if proto == "udp" { "private" } else { pick(rng, &[("telnet", 0.7), ("ftp_data", 0.2), ("login", 0.1)]) };
            row.cat(proto, service, "SF");
            row.set("duration", lognormal(rng, 120.0, 1.0));
            row.set("src_bytes", lognormal(rng, 1500.0, 1.0));
            row.set("dst_bytes", lognormal(rng, 4000.0, 1.0));
            row.set("hot", rng.random_range(1..=3) as f64);
            row.set("logged_in", 1.0);
            row.set("root_shell", if rng.random::<f64>() < 0.7 { 1.0 } else { 0.0 });
            row.set("num_file_creations", rng.random_range(0..=2) as f64);
            row.set("num_root", rng.random_range(0..=3) as f64);
            row.set("num_shells", if rng.random::<f64>() < 0.3 { 1.0 } else { 0.0 });
            row.set("dst_host_count", rng.random_range(1..=30) as f64);
            row.set("dst_host_srv_count", rng.random_range(1..=30) as f64);
        }
        _ => normal_traffic(row, rng),
    }
}

/// Generates a shuffled synthetic data set with `scale` times the KDDTrain+
/// composition (every attack name keeps at least one row).
pub fn synthetic_records(scale: f64, seed: u64) -> Vec<RawRecord> {
    assert!(scale > 0.0, "scale must be positive");
    let schema = FeatureSchema::nsl_kdd();
    let idx: HashMap<&'static str, usize> = schema
        .continuous()
        .enumerate()
        .map(|(i, f)| (f.name, i))
        .collect();
    let taxonomy = AttackTaxonomy::bundled();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut records = Vec::new();
    for &(attack, count) in &KDD_TRAIN_PLUS_COMPOSITION {
        let n = ((count as f64 * scale).round() as usize).max(1);
        let camouflage = camouflage_rate(taxonomy.category(attack).expect("composition names are in the taxonomy"));
        for _ in 0..n {
            let mut row = Row {
                idx: &idx,
                continuous: vec![0.0; schema.n_continuous()],
                categorical: Default::default(),
            };
            if rng.random::<f64>() < camouflage {
                normal_traffic(&mut row, &mut rng);
                // Camouflaged rows keep one weak trace of the attack family.
                row.set("hot", rng.random_range(0..=2) as f64);
            } else {
                attack_traffic(&mut row, &mut rng, attack);
            }
            let [p, s, f] = row.categorical;
            records.push(RawRecord {
                continuous: row.continuous,
                categorical: vec![p, s, f],
                attack_name: attack.to_string(),
                difficulty: Some(rng.random_range(10..=21)),
            });
        }
    }
    records.shuffle(&mut rng);
    records
}
