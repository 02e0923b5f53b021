#pragma once

// Textual scenario descriptions: input states, sequences and observables.
//
// Compact state syntax joins single-mode factors with "⊗" or "*", e.g. "coherent(2)⊗fock(8)". A lone single-mode
// factor leaves mode b in vacuum. Two-mode and atomic factors stand alone: "twin_fock(8)", "acs(6,-1)".

#include <algorithm>
#include <cctype>
#include <cmath>
#include <functional>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "paritylab/errors.hpp"
#include "paritylab/fock.hpp"
#include "paritylab/interferometer.hpp"
#include "paritylab/states.hpp"

namespace paritylab::scenario {

enum class FactorKind { SingleMode, TwoMode, Atomic };

struct Factory {
    FactorKind kind;
    std::vector<std::string> params;
    std::vector<std::optional<double>> defaults;  // nullopt: required
    std::function<AngularState(const std::vector<double>&, int cutoff)> build;
    std::function<TwoModeState(const std::vector<double>&, int cutoff)> build_mode;  // single-mode only
};

namespace detail {

inline int as_int(double v, const std::string& what) {
    if (v != std::round(v)) throw DomainError(what + " must be an integer");
    return static_cast<int>(v);
}

inline Factory single(std::vector<std::string> names, std::vector<std::optional<double>> defs,
                      std::function<TwoModeState(const std::vector<double>&, int)> make) {
    Factory f{FactorKind::SingleMode, std::move(names), std::move(defs), nullptr, make};
    f.build = [make](const std::vector<double>& a, int cutoff) { return to_angular(make(a, cutoff)); };
    return f;
}

inline Factory two_mode(std::vector<std::string> names, std::vector<std::optional<double>> defs,
                        std::function<TwoModeState(const std::vector<double>&, int)> make) {
    return {FactorKind::TwoMode, std::move(names), std::move(defs),
            [make](const std::vector<double>& a, int cutoff) { return to_angular(make(a, cutoff)); }, nullptr};
}

inline Factory atomic(std::vector<std::string> names, std::vector<std::optional<double>> defs,
                      std::function<AngularState(const std::vector<double>&)> make) {
    return {FactorKind::Atomic, std::move(names), std::move(defs),
            [make](const std::vector<double>& a, int) { return make(a); }, nullptr};
}

}  // namespace detail

inline const std::map<std::string, Factory>& factories() {
    using detail::as_int;
    static const std::map<std::string, Factory> table = {
        {"vacuum", detail::single({}, {}, [](const auto&, int) { return vacuum(); })},
        {"fock", detail::single({"n"}, {std::nullopt}, [](const auto& a, int) { return fock(as_int(a[0], "n")); })},
        {"coherent", detail::single({"re", "im"}, {std::nullopt, 0.0},
                                    [](const auto& a, int c) { return coherent(Complex(a[0], a[1]), c); })},
        {"svs", detail::single({"r"}, {std::nullopt}, [](const auto& a, int c) { return squeezed_vacuum(a[0], c); })},
        {"cat", detail::single({"re", "im", "theta"}, {std::nullopt, 0.0, 0.0},
                               [](const auto& a, int c) { return cat(Complex(a[0], a[1]), a[2], c); })},
        {"fock_pair", detail::two_mode({"n", "q"}, {std::nullopt, std::nullopt},
                                       [](const auto& a, int) {
                                           return fock_pair(as_int(a[0], "n"), as_int(a[1], "q"));
                                       })},
        {"twin_fock", detail::two_mode({"N"}, {std::nullopt},
                                       [](const auto& a, int) { return twin_fock(as_int(a[0], "N")); })},
        {"noon", detail::two_mode({"N", "Phi"}, {std::nullopt, 0.0},
                                  [](const auto& a, int) { return noon(as_int(a[0], "N"), a[1]); })},
        {"tmsvs", detail::two_mode({"r", "phase"}, {std::nullopt, 0.0},
                                   [](const auto& a, int c) { return tmsvs_from_squeeze(a[0], a[1], c); })},
        {"pair_coherent", detail::two_mode({"re", "im"}, {std::nullopt, 0.0},
                                           [](const auto& a, int c) { return pair_coherent(Complex(a[0], a[1]), c); })},
        // |beta>_a (x) cat(-i beta, pi/2)_b with |beta|^2 = nbar/2, the ECS input for the MZI.
        {"ecs", detail::two_mode({"nbar"}, {std::nullopt},
                                 [](const auto& a, int c) {
                                     if (!(a[0] > 0.0)) throw DomainError("ecs needs nbar > 0");
                                     const Complex beta = std::sqrt(0.5 * a[0]);
                                     return product(coherent(beta, c), cat(-kI * beta, kPi / 2, c));
                                 })},
        {"dicke", detail::atomic({"N", "m"}, {std::nullopt, std::nullopt},
                                 [](const auto& a) { return dicke(Spin(as_int(a[0], "N")), a[1]); })},
        {"acs", detail::atomic({"N", "re", "im"}, {std::nullopt, -1.0, 0.0},
                               [](const auto& a) { return atomic_coherent(Complex(a[1], a[2]), Spin(as_int(a[0], "N"))); })},
        {"jzop", detail::atomic({"N", "q"}, {std::nullopt, 1.0},
                                [](const auto& a) { return jz_operated_acs(Spin(as_int(a[0], "N")), as_int(a[1], "q")); })},
        {"mes", detail::atomic({"N"}, {std::nullopt},
                               [](const auto& a) { return maximally_entangled(Spin(as_int(a[0], "N"))); })},
    };
    return table;
}

struct Factor {
    std::string name;
    std::vector<double> args;
};

namespace detail {

inline std::string trim(std::string s) {
    const auto first = s.find_first_not_of(" \t\n");
    if (first == std::string::npos) return "";
    return s.substr(first, s.find_last_not_of(" \t\n") - first + 1);
}

inline const Factory& factory(const std::string& name) {
    const auto it = factories().find(name);
    if (it == factories().end()) throw DomainError("unknown state '" + name + "'");
    return it->second;
}

inline std::vector<double> complete(const Factory& f, const std::string& name, std::vector<double> args) {
    if (args.size() > f.params.size()) throw DomainError("too many arguments for '" + name + "'");
    for (std::size_t i = args.size(); i < f.params.size(); ++i) {
        if (!f.defaults[i]) throw DomainError("'" + name + "' needs parameter '" + f.params[i] + "'");
        args.push_back(*f.defaults[i]);
    }
    return args;
}

inline Factor parse_factor(const std::string& text) {
    const auto t = trim(text);
    const auto open = t.find('(');
    Factor f;
    if (open == std::string::npos) {
        f.name = t;
        return f;
    }
    if (t.back() != ')') throw DomainError("malformed factor '" + t + "'");
    f.name = trim(t.substr(0, open));
    const auto inner = t.substr(open + 1, t.size() - open - 2);
    std::size_t pos = 0;
    while (pos <= inner.size() && !trim(inner.substr(pos)).empty()) {
        const auto comma = inner.find(',', pos);
        const auto token = trim(inner.substr(pos, comma == std::string::npos ? std::string::npos : comma - pos));
        std::size_t used = 0;
        double v = 0.0;
        try {
            v = std::stod(token, &used);
        } catch (const std::exception&) {
            throw DomainError("bad number '" + token + "' in '" + t + "'");
        }
        if (used != token.size()) throw DomainError("bad number '" + token + "' in '" + t + "'");
        f.args.push_back(v);
        if (comma == std::string::npos) break;
        pos = comma + 1;
    }
    return f;
}

inline std::vector<std::string> split_product(const std::string& text) {
    static const std::string tensor = "\xE2\x8A\x97";  // U+2297
    std::vector<std::string> parts;
    std::string current;
    int depth = 0;
    for (std::size_t i = 0; i < text.size(); ++i) {
        const char c = text[i];
        if (c == '(') ++depth;
        if (c == ')') --depth;
        if (depth == 0 && (c == '*' || text.compare(i, tensor.size(), tensor) == 0)) {
            parts.push_back(current);
            current.clear();
            if (c != '*') i += tensor.size() - 1;
            continue;
        }
        current += c;
    }
    parts.push_back(current);
    return parts;
}

inline AngularState build(const std::vector<Factor>& factors, int cutoff) {
    if (factors.empty() || factors.size() > 2) throw DomainError("a state has one or two factors");
    const auto& first = factory(factors[0].name);
    if (factors.size() == 1) {
        const auto args = complete(first, factors[0].name, factors[0].args);
        if (first.kind == FactorKind::SingleMode) return to_angular(product(first.build_mode(args, cutoff), vacuum()));
        return first.build(args, cutoff);
    }
    const auto& second = factory(factors[1].name);
    if (first.kind != FactorKind::SingleMode || second.kind != FactorKind::SingleMode)
        throw DomainError("only single-mode factors combine with a tensor product");
    return to_angular(product(first.build_mode(complete(first, factors[0].name, factors[0].args), cutoff),
                              second.build_mode(complete(second, factors[1].name, factors[1].args), cutoff)));
}

}  // namespace detail

// cutoff < 0 selects the automatic truncation rule.
inline AngularState parse_state(const std::string& text, int cutoff = -1) {
    std::vector<Factor> factors;
    for (const auto& part : detail::split_product(text)) factors.push_back(detail::parse_factor(part));
    return detail::build(factors, cutoff);
}

namespace detail {

inline Factor factor_from_json(const nlohmann::json& j) {
    if (!j.is_object() || !j.contains("type") || !j["type"].is_string())
        throw DomainError("state object needs a string 'type'");
    Factor f{j["type"].get<std::string>(), {}};
    const auto& fac = factory(f.name);
    for (const auto& [key, value] : j.items()) {
        if (key == "type") continue;
        if (std::find(fac.params.begin(), fac.params.end(), key) == fac.params.end())
            throw DomainError("unknown field '" + key + "' for state '" + f.name + "'");
        if (!value.is_number()) throw DomainError("field '" + key + "' must be a number");
    }
    for (std::size_t i = 0; i < fac.params.size(); ++i) {
        const auto& key = fac.params[i];
        if (j.contains(key)) {
            f.args.push_back(j[key].get<double>());
        } else if (fac.defaults[i]) {
            f.args.push_back(*fac.defaults[i]);
        } else {
            throw DomainError("state '" + f.name + "' needs field '" + key + "'");
        }
    }
    return f;
}

}  // namespace detail

// {"type": "twin_fock", "N": 8} or {"product": [{"type": "coherent", "re": 2}, {"type": "fock", "n": 8}]};
// a plain string is read with the compact syntax.
inline AngularState state_from_json(const nlohmann::json& j, int cutoff = -1) {
    if (j.is_string()) return parse_state(j.get<std::string>(), cutoff);
    if (j.is_object() && j.contains("product")) {
        if (j.size() != 1) throw DomainError("'product' admits no sibling fields");
        if (!j["product"].is_array()) throw DomainError("'product' must be an array");
        std::vector<Factor> factors;
        for (const auto& e : j["product"]) factors.push_back(detail::factor_from_json(e));
        return detail::build(factors, cutoff);
    }
    return detail::build({detail::factor_from_json(j)}, cutoff);
}

inline SequenceSpec parse_sequence(const std::string& name, double noon_phase = 0.0) {
    if (name == "mzi") return SequenceSpec::mzi();
    if (name == "mzi-jy") return SequenceSpec::mzi_jy_first();
    if (name == "ramsey") return SequenceSpec::ramsey();
    if (name == "ramsey-prepared") return SequenceSpec::ramsey_prepared();
    if (name == "magic-noon") return SequenceSpec::magic_noon(noon_phase);
    throw DomainError("unknown sequence '" + name + "' (mzi, mzi-jy, ramsey, ramsey-prepared, magic-noon)");
}

// parity-b, parity-a, jz, two-jz, jx, jy, zero-a, zero-b, n-a, n-b, ground, excited, sigma:N
inline Observable parse_observable(const std::string& name) {
    static const std::map<std::string, ObservableKind> kinds = {
        {"parity-a", ObservableKind::ParityA},     {"parity-b", ObservableKind::ParityB},
        {"jx", ObservableKind::Jx},                {"jy", ObservableKind::Jy},
        {"jz", ObservableKind::Jz},                {"two-jz", ObservableKind::TwoJz},
        {"zero-a", ObservableKind::ZeroPhotonA},   {"zero-b", ObservableKind::ZeroPhotonB},
        {"n-a", ObservableKind::NumberA},          {"n-b", ObservableKind::NumberB},
        {"ground", ObservableKind::ParityAtomicGround}, {"excited", ObservableKind::ParityAtomicExcited},
    };
    if (name.rfind("sigma:", 0) == 0) {
        const auto n = name.substr(6);
        if (n.empty() || !std::all_of(n.begin(), n.end(), [](unsigned char c) { return std::isdigit(c); }))
            throw DomainError("sigma needs an integer order, e.g. sigma:4");
        return Observable::sigma(std::stoi(n));
    }
    const auto it = kinds.find(name);
    if (it == kinds.end()) throw DomainError("unknown observable '" + name + "'");
    return Observable::of(it->second);
}

}  // namespace paritylab::scenario
