#pragma once

// Published reference tables, verbatim, with the column tolerances used to
// compare a regenerated run against them.

#include <limits>
#include <string>
#include <vector>

namespace balmetric::golden {

/// Cell tolerance is max(abs, rel * |expected|).
struct ColumnTolerance {
    double abs = 0.0;
    double rel = 0.0;
};

struct Table {
    std::string id;
    std::string description;
    std::vector<std::string> columns;
    std::vector<ColumnTolerance> tolerances;
    std::vector<int> rows;                      // iteration index r of each row
    std::vector<std::vector<double>> values;    // NaN marks a blank cell
};

// T_K, k = 2, from (1, 17, 36); scaled so the limit is (1, 12, 36).
inline const Table& tk_k2() {
    static const Table t{
        "tk-k2",
        "T_K iterations, k = 2, start proportional to (1, 17, 36)",
        {"a_0", "a_1", "a_2", "err", "bnd"},
        {{1e-4, 0}, {1e-4, 0}, {1e-4, 0}, {5e-4, 0}, {5e-4, 0}},
        {0, 1, 2, 3, 4, 5},
        {
            {0.8826, 15.0043, 31.7738, 0.2848, 1.0180},
            {0.9738, 12.6377, 35.0561, 0.0640, 0.3027},
            {0.9946, 12.1292, 35.8067, 0.0131, 0.0683},
            {0.9989, 12.0259, 35.9612, 0.0026, 0.0140},
            {0.9998, 12.0052, 35.9922, 0.0005, 0.0028},
            {1.0000, 12.0010, 35.9984, 0.0001, 0.0006},
        }};
    return t;
}

// T_nu, k = 3, from (1, 25, 0.07, 13); limit (1, 3, 3, 1).
inline const Table& tnu_k3() {
    static const Table t{
        "tnu-k3",
        "T_nu iterations, k = 3, start proportional to (1, 25, 0.07, 13)",
        {"a_0", "a_1", "a_2", "a_3", "err", "bnd"},
        {{1e-4, 0}, {1e-4, 0}, {1e-4, 0}, {1e-4, 0}, {5e-4, 0}, {5e-4, 0}},
        {0, 1, 2, 3, 4, 5, 10, 15, 20},
        {
            {0.20720, 5.18011, 0.01450, 2.69366, 5.67338, 17.02014},
            {0.57206, 2.68260, 3.45522, 1.58209, 0.74488, 16.50932},
            {0.73295, 2.72858, 3.31411, 1.32528, 0.44129, 15.99849},
            {0.83372, 2.82894, 3.18320, 1.18836, 0.26423, 15.48766},
            {0.89777, 2.89557, 3.10812, 1.11040, 0.15845, 14.97684},
            {0.93773, 2.93684, 3.06435, 1.06526, 0.09505, 14.46601},
            {0.99505, 2.99505, 3.00496, 1.00497, 0.00739, 11.91189},
            {0.99961, 2.99962, 3.00039, 1.00039, 0.00057, 9.35784},
            {0.99997, 2.99997, 3.00003, 1.00003, 0.00004, 6.80474},
        }};
    return t;
}

// T, k = 6, palindromic start (1, 6000, 150000, 2e10, ...); only a_0..a_3 are
// listed. The coefficient columns are printed to five decimals, so the
// absolute floor is half a unit in that place.
inline const Table& t_k6() {
    static const Table t{
        "t-k6",
        "T iterations, k = 6, palindromic start (1, 6000, 150000, 2e10, 150000, 6000, 1)",
        {"a_0", "a_1", "a_2", "a_3", "err", "bnd"},
        {{5e-6, 1e-3}, {5e-6, 1e-3}, {5e-6, 1e-3}, {5e-6, 1e-3}, {5e-3, 0}, {5e-3, 0}},
        {0, 1, 2, 3, 4, 5, 10, 20, 30, 40, 50, 60, 70, 80, 90, 100},
        {
            {0.00010, 0.58903, 14.72580, 1963439.38600, 17.69856, 106.19139},
            {0.00010, 0.48814, 1073.02459, 733382.16850, 18.10011, 106.00906},
            {0.00011, 0.60722, 1196.93120, 414634.58830, 17.67812, 105.82674},
            {0.00013, 0.72695, 1195.91914, 257759.72070, 17.21170, 105.64441},
            {0.00016, 0.84269, 1147.31003, 167930.51810, 16.72422, 105.46208},
            {0.00020, 0.95726, 1076.08572, 112611.11230, 16.22342, 105.27976},
            {0.00068, 1.58083, 669.18359, 18910.93755, 13.62571, 104.36813},
            {0.01002, 3.32601, 190.00391, 970.58975, 8.42894, 102.54488},
            {0.11205, 5.07732, 52.17933, 117.34474, 3.98456, 100.72162},
            {0.51092, 5.88292, 22.24884, 34.20518, 1.22538, 98.89836},
            {0.87358, 5.99470, 16.26035, 22.28184, 0.24744, 97.07511},
            {0.97741, 5.99984, 15.20684, 20.36883, 0.04187, 95.25185},
            {0.99629, 6.00000, 15.03350, 20.05958, 0.00682, 93.42860},
            {0.99940, 6.00000, 15.00541, 20.00962, 0.00110, 91.60534},
            {0.99990, 6.00000, 15.00088, 20.00156, 0.00018, 89.78209},
            {0.99998, 6.00000, 15.00014, 20.00025, 0.00003, 87.95883},
        }};
    return t;
}

// T_nu on CP^3, k = 4, fully symmetric start with class values
// (a_1, a_2, a_5, a_6, a_15) = (1, 20, 30, 40, 50); every iterate scaled so
// a_1 = 1. sigma_tilde_r = (a_{2,r} - 4) / (a_{2,r-1} - 4); blank at r = 0.
inline const Table& cpn_k4() {
    static const double blank = std::numeric_limits<double>::quiet_NaN();
    static const Table t{
        "cpn-k4",
        "T_nu on CP^3, k = 4, symmetric start with class values (1, 20, 30, 40, 50)",
        {"a_2", "a_5", "a_6", "a_15", "sigma_tilde"},
        {{1e-3, 0}, {1e-3, 0}, {1e-3, 0}, {1e-3, 0}, {5e-4, 0}},
        {0, 1, 2, 3, 4, 5, 6, 7, 8},
        {
            {20.0000000, 30.0000000, 40.0000000, 50.0000000, blank},
            {4.3071170, 6.5967335, 13.0915039, 25.9850356, 0.0192},
            {4.0344368, 6.0688663, 12.1588436, 24.3600437, 0.1121},
            {4.0052604, 6.0105224, 12.0258597, 24.0613530, 0.1528},
            {4.0008611, 6.0017223, 12.0042908, 24.0102741, 0.1637},
            {4.0001430, 6.0002860, 12.0007145, 24.0017140, 0.1661},
            {4.0000238, 6.0000476, 12.0001191, 24.0002857, 0.1665},
            {4.0000040, 6.0000079, 12.0000198, 24.0000476, 0.1666},
            {4.0000007, 6.0000013, 12.0000033, 24.0000079, 0.1667},
        }};
    return t;
}

inline std::vector<std::string> table_ids() { return {"tk-k2", "tnu-k3", "t-k6", "cpn-k4"}; }

} // namespace balmetric::golden
