//! Reference triangles for integer `1 <= N <= 50` with positive-rank `E_N`.

use num_bigint::BigInt;

use crate::arith::BigRational;
use crate::triangle::Triangle;

/// `(N, f, g, h)` with `h` touched by the excircle.
pub const TABLE_ROWS: [(u32, &str, &str, &str); 28] = [
    (3, "25", "27", "8"),
    (5, "121", "147", "40"),
    (8, "49", "50", "6"),
    (10, "121", "128", "15"),
    (11, "471969", "591976", "142885"),
    (13, "24037", "35000", "11913"),
    (15, "243", "245", "16"),
    (17, "4107", "4205", "272"),
    (23, "363", "368", "17"),
    (24, "242", "243", "10"),
    (26, "1568", "1587", "65"),
    (27, "24900840", "26234439", "1866059"),
    (29, "256", "261", "11"),
    (31, "130355", "126736", "6171"),
    (32, "84568", "73947", "11830"),
    (33, "1323", "1352", "55"),
    (34, "529", "640", "119"),
    (35, "847", "845", "24"),
    (36, "5043", "5415", "448"),
    (37, "31423", "31205", "888"),
    (38, "150544", "164331", "15895"),
    (39, "116467264", "143721781", "28780245"),
    (41, "158251147734128961", "179454792712801424", "23209487182638905"),
    (42, "841", "864", "35"),
    (43, "2989137", "2805275", "219128"),
    (46, "18910493440839", "18598307793911", "571951808000"),
    (48, "675", "676", "14"),
    (50, "2401", "2535", "160"),
];

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TableRow {
    pub n: BigRational,
    pub triangle: Triangle,
}

pub fn builtin_rows() -> Vec<TableRow> {
    TABLE_ROWS
        .iter()
        .map(|&(n, f, g, h)| {
            let side = |s: &str| s.parse::<BigInt>().expect("table sides are integers");
            TableRow {
                n: BigRational::from_integer(BigInt::from(n)),
                triangle: Triangle::from_bigints(side(f), side(g), side(h)),
            }
        })
        .collect()
}

pub fn builtin_row(n: u32) -> Option<TableRow> {
    let pos = TABLE_ROWS.iter().position(|r| r.0 == n)?;
    builtin_rows().into_iter().nth(pos)
}
