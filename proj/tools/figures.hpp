#pragma once

// Figure-data registry: each id produces one or more CSV tables.

#include <cmath>
#include <cstdio>
#include <functional>
#include <string>
#include <vector>

#include "paritylab/paritylab.hpp"

namespace paritylab::cli {

struct Table {
    std::string name;
    std::vector<std::string> meta;  // written as "# " lines
    std::vector<std::string> columns;
    std::vector<std::vector<double>> rows;
};

inline std::string format_number(double x) {
    if (std::isnan(x)) return "nan";
    if (std::isinf(x)) return x > 0 ? "inf" : "-inf";
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", x);
    return buf;
}

inline std::string to_csv(const Table& t) {
    std::string out;
    for (const auto& m : t.meta) out += "# " + m + "\n";
    for (std::size_t i = 0; i < t.columns.size(); ++i) out += (i ? "," : "") + t.columns[i];
    out += "\n";
    for (const auto& row : t.rows) {
        for (std::size_t i = 0; i < row.size(); ++i) out += (i ? "," : "") + format_number(row[i]);
        out += "\n";
    }
    return out;
}

struct FigureEntry {
    std::string id;
    std::string description;
    std::function<std::vector<Table>()> build;
};

namespace figures {

inline std::vector<double> linspace(double lo, double hi, int n) { return phase_grid(lo, hi, n); }

inline const Observable& parity_b() {
    static const Observable op = Observable::of(ObservableKind::ParityB);
    return op;
}

inline const Observable& ground() {
    static const Observable op = Observable::of(ObservableKind::ParityAtomicGround);
    return op;
}

inline std::string fmt(double x) { return format_number(x); }

// Rows of (x, f_1(x), ..., f_k(x)) evaluated in parallel.
inline std::vector<std::vector<double>> tabulate(const std::vector<double>& xs,
                                                 const std::function<std::vector<double>(double)>& f) {
    return parallel_map(xs, [&](double x) {
        std::vector<double> row{x};
        const auto v = f(x);
        row.insert(row.end(), v.begin(), v.end());
        return row;
    });
}

inline double qcrb(const AngularState& in, const SequenceSpec& seq) {
    return bound_from_information(qfi_pure(in, seq));
}

inline std::vector<Table> ecs_parity() {
    std::vector<Table> out;
    for (double nbar : {5.0, 25.0}) {
        const auto in = scenario::parse_state("ecs(" + fmt(nbar) + ")");
        Table t{"nbar" + fmt(nbar),
                {"output parity <Pi_b> vs phase for the entangled coherent input, cat relative phase theta = pi/2",
                 "nbar_tot = " + fmt(nbar), "sequence = mzi", "observable = parity-b"},
                {"phi", "parity", "parity_closed_form"},
                {}};
        t.rows = tabulate(linspace(-kPi / 2, kPi / 2, 401), [&](double phi) {
            return std::vector<double>{signal(in, SequenceSpec::mzi(), parity_b(), phi).expectation,
                                       closed::ecs_parity(nbar, phi).expectation};
        });
        out.push_back(std::move(t));
    }
    return out;
}

inline std::vector<Table> ecs_pu() {
    const double phi = kPi / 45;
    Table t{"pu",
            {"parity phase uncertainty vs nbar_tot for the entangled coherent input", "phi = pi/45",
             "theta = pi/2", "sequence = mzi"},
            {"nbar_tot", "delta_phi", "sql", "hl", "qcrb"},
            {}};
    std::vector<double> ns;
    for (int n = 1; n <= 40; ++n) ns.push_back(n);
    t.rows = tabulate(ns, [&](double nbar) {
        const auto in = scenario::parse_state("ecs(" + fmt(nbar) + ")");
        return std::vector<double>{signal(in, SequenceSpec::mzi(), parity_b(), phi).delta_phi, 1.0 / std::sqrt(nbar),
                                   1.0 / nbar, qcrb(in, SequenceSpec::mzi())};
    });
    return {t};
}

inline std::vector<Table> tfs_prob() {
    const int n = 8;
    const auto mid = prepare(to_angular(twin_fock(n)), SequenceSpec::mzi_jy_first());
    const Spin spin(2 * n);
    Table t{"arcsine",
            {"joint photon-number distribution after a 50:50 splitter on |N,N>", "N = 8"},
            {"n_a", "n_b", "probability"},
            {}};
    for (int k = 0; k < spin.dim(); ++k)
        t.rows.push_back({double(k), double(spin.twice() - k), std::norm(mid.sector(spin)[k])});
    return {t};
}

inline std::vector<Table> tfs_pu() {
    const double phi = 1e-4;
    Table t{"pu",
            {"parity phase uncertainty for twin-Fock input vs N", "phi = 1e-4", "sequence = mzi-jy"},
            {"N", "delta_phi", "qcrb", "sql", "hl"},
            {}};
    std::vector<double> ns;
    for (int n = 1; n <= 20; ++n) ns.push_back(n);
    t.rows = tabulate(ns, [&](double nd) {
        const int n = static_cast<int>(nd);
        const auto in = to_angular(twin_fock(n));
        const auto seq = SequenceSpec::mzi_jy_first();
        return std::vector<double>{signal(in, seq, parity_b(), phi).delta_phi, qcrb(in, seq),
                                   1.0 / std::sqrt(2.0 * n), 1.0 / (2.0 * n)};
    });
    return {t};
}

inline std::vector<Table> tmsvs_pu() {
    const std::vector<double> phis{1e-3, 1e-2, 5e-2};
    Table t{"pu",
            {"parity phase uncertainty for the two-mode squeezed vacuum vs nbar_tot at several phases",
             "phi in {1e-3, 1e-2, 5e-2}", "sequence = mzi-jy"},
            {"nbar_tot", "delta_phi_1e-3", "delta_phi_1e-2", "delta_phi_5e-2", "hl", "hoffman"},
            {}};
    std::vector<double> ns;
    for (int i = 1; i <= 40; ++i) ns.push_back(0.25 * i);
    t.rows = tabulate(ns, [&](double nbar) {
        const double r = std::asinh(std::sqrt(0.5 * nbar));
        const auto in = to_angular(tmsvs_from_squeeze(r));
        std::vector<double> row;
        for (double phi : phis) row.push_back(signal(in, SequenceSpec::mzi_jy_first(), parity_b(), phi).delta_phi);
        row.push_back(1.0 / nbar);
        row.push_back(closed::tmsvs_hoffman(nbar));
        return row;
    });
    return {t};
}

inline std::vector<Table> alpha_n_parity() {
    std::vector<Table> out;
    const std::vector<double> amps{1.0, 2.0, 3.0};
    for (int n : {1, 8}) {
        Table t{"N" + std::to_string(n),
                {"output parity <Pi_b> for coherent (x) Fock input", "N = " + std::to_string(n),
                 "|alpha| in {1, 2, 3}", "sequence = mzi"},
                {"phi", "parity_alpha1", "parity_alpha2", "parity_alpha3"},
                {}};
        std::vector<AngularState> inputs;
        for (double a : amps) inputs.push_back(to_angular(product(coherent(a), fock(n))));
        t.rows = tabulate(linspace(-kPi / 2, kPi / 2, 401), [&](double phi) {
            std::vector<double> row;
            for (const auto& in : inputs) row.push_back(signal(in, SequenceSpec::mzi(), parity_b(), phi).expectation);
            return row;
        });
        out.push_back(std::move(t));
    }
    return out;
}

inline std::vector<Table> alpha_n_pu() {
    std::vector<Table> out;
    const double phi = 1e-4;
    for (int n : {1, 8}) {
        Table t{"N" + std::to_string(n),
                {"parity phase uncertainty for coherent (x) Fock input vs |alpha|", "N = " + std::to_string(n),
                 "phi = 1e-4", "sequence = mzi"},
                {"alpha", "nbar_tot", "delta_phi", "qcrb", "sql", "hl"},
                {}};
        std::vector<double> amps;
        for (int i = 1; i <= 50; ++i) amps.push_back(0.1 * i);
        t.rows = tabulate(amps, [&](double a) {
            const auto in = to_angular(product(coherent(a), fock(n)));
            const double nbar = a * a + n;
            return std::vector<double>{nbar, signal(in, SequenceSpec::mzi(), parity_b(), phi).delta_phi,
                                       qcrb(in, SequenceSpec::mzi()), 1.0 / std::sqrt(nbar), 1.0 / nbar};
        });
        out.push_back(std::move(t));
    }
    return out;
}

inline std::vector<Table> coh_vac() {
    const double alpha = 5.0, nbar = alpha * alpha;
    const auto in = to_angular(product(coherent(alpha), vacuum()));
    Table t{"resolution",
            {"scaled intensity difference <2Jz>/nbar and parity <Pi_b> for coherent (x) vacuum", "|alpha| = 5",
             "sequence = mzi"},
            {"phi", "two_jz_scaled", "parity_b"},
            {}};
    t.rows = tabulate(linspace(-kPi, kPi, 801), [&](double phi) {
        return std::vector<double>{
            signal(in, SequenceSpec::mzi(), Observable::of(ObservableKind::TwoJz), phi).expectation / nbar,
            signal(in, SequenceSpec::mzi(), parity_b(), phi).expectation};
    });
    return {t};
}

inline std::vector<Table> ramsey_curves(const std::string& name, const std::string& what,
                                        const std::vector<AngularState>& inputs,
                                        const std::vector<std::string>& labels, const SequenceSpec& seq,
                                        const Observable& op, bool absolute = false) {
    Table t{name, {what, "sequence = " + seq.label}, {"phi"}, {}};
    t.columns.insert(t.columns.end(), labels.begin(), labels.end());
    t.rows = tabulate(linspace(-kPi, kPi, 801), [&](double phi) {
        std::vector<double> row;
        for (const auto& in : inputs) {
            const double v = signal(in, seq, op, phi).expectation;
            row.push_back(absolute ? std::abs(v) : v);
        }
        return row;
    });
    return {t};
}

inline std::vector<Table> rs_jz() {
    return ramsey_curves("jz", "<Jz> vs phase for atomic coherent states, j in {1/2, 3}",
                         {dicke(Spin(1), -0.5), dicke(Spin(6), -3.0)}, {"jz_j0.5", "jz_j3"}, SequenceSpec::ramsey(),
                         Observable::of(ObservableKind::Jz));
}

inline std::vector<Table> rs_acs() {
    std::vector<AngularState> inputs;
    for (int tj : {1, 6, 20, 100}) inputs.push_back(dicke(Spin(tj), -0.5 * tj));
    return ramsey_curves("parity", "ground-state parity for atomic coherent states, j in {1/2, 3, 10, 50}", inputs,
                         {"parity_j0.5", "parity_j3", "parity_j10", "parity_j50"}, SequenceSpec::ramsey(), ground());
}

inline std::vector<Table> rs_jzop() {
    auto a = ramsey_curves("acs-vs-jzop", "parity for an atomic coherent state and its Jz-operated partner, N = 6",
                           {atomic_coherent(Complex(-1.0), Spin(6)), jz_operated_acs(Spin(6), 1)},
                           {"parity_acs", "parity_jzop"}, SequenceSpec::ramsey_prepared(), ground());
    std::vector<AngularState> inputs;
    for (int q = 1; q <= 4; ++q) inputs.push_back(jz_operated_acs(Spin(26), q));
    auto b = ramsey_curves("q-series", "|<Pi>| for Jz^q-operated atomic coherent states, N = 26, q in {1, 2, 3, 4}",
                           inputs, {"abs_parity_q1", "abs_parity_q2", "abs_parity_q3", "abs_parity_q4"},
                           SequenceSpec::ramsey_prepared(), ground(), true);
    a.push_back(std::move(b.front()));
    return a;
}

}  // namespace figures

inline const std::vector<FigureEntry>& figure_registry() {
    static const std::vector<FigureEntry> entries = {
        {"ecs-parity", "entangled coherent state parity signal", figures::ecs_parity},
        {"ecs-pu", "entangled coherent state phase uncertainty", figures::ecs_pu},
        {"tfs-prob", "arcsine photon-number distribution of a split twin-Fock state", figures::tfs_prob},
        {"tfs-pu", "twin-Fock parity phase uncertainty", figures::tfs_pu},
        {"tmsvs-pu", "two-mode squeezed vacuum parity phase uncertainty", figures::tmsvs_pu},
        {"alphaN-parity", "coherent (x) Fock parity signal", figures::alpha_n_parity},
        {"alphaN-pu", "coherent (x) Fock phase uncertainty", figures::alpha_n_pu},
        {"coh-vac", "coherent light resolution: parity vs intensity difference", figures::coh_vac},
        {"rs-jz", "Ramsey <Jz> signal", figures::rs_jz},
        {"rs-acs", "Ramsey parity for atomic coherent states", figures::rs_acs},
        {"rs-jzop", "Ramsey parity for Jz-operated atomic coherent states", figures::rs_jzop},
    };
    return entries;
}

}  // namespace paritylab::cli
