// Copyright 2026 The Spinnet Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#pragma once

#include <algorithm>
#include <array>
#include <cctype>
#include <cstdint>
#include <optional>
#include <random>
#include <set>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

namespace spinnet {

// A network in triode/wire normal form. Node ids are 1-based and every node
// belongs to exactly one triode, so Q = 3T. The three positions of a triode
// are its x, y, z slots in that order.
using Triode = std::array<int, 3>;

// Unordered node pair, stored normalized as (lo, hi).
using Wire = std::pair<int, int>;

enum class GateKind { triode, xor_gate };

struct ParseError : std::runtime_error {
    ParseError(const std::string& msg, int line = 0)
        : std::runtime_error(line > 0 ? "line " + std::to_string(line) + ": " + msg : msg),
          line(line) {}
    int line;
};

// Position of a node inside its triode: 0-based triode index and axis slot
// (0 = x, 1 = y, 2 = z).
struct NodeSite {
    int triode;
    int axis;
};

class BooleanNetwork {
  public:
    // Validates and takes ownership. Throws std::invalid_argument on a node
    // appearing in zero or two triodes, out-of-range ids, self-wires, wires
    // touching unknown nodes, or duplicate wires.
    static BooleanNetwork make(std::vector<Triode> triodes, std::vector<Wire> wires) {
        if (triodes.empty()) throw std::invalid_argument("network has no triodes");
        const int t_count = static_cast<int>(triodes.size());
        const int q_count = 3 * t_count;

        std::vector<int> times_seen(q_count + 1, 0);
        for (const auto& tr : triodes) {
            for (int id : tr) {
                if (id < 1 || id > q_count)
                    throw std::invalid_argument("node id " + std::to_string(id) +
                                                " out of range [1, " + std::to_string(q_count) +
                                                "] (Q = 3T)");
                times_seen[id] += 1;
            }
        }
        for (int id = 1; id <= q_count; ++id) {
            if (times_seen[id] == 0)
                throw std::invalid_argument("node " + std::to_string(id) +
                                            " belongs to no triode");
            if (times_seen[id] > 1)
                throw std::invalid_argument("node " + std::to_string(id) +
                                            " belongs to more than one triode");
        }

        std::set<Wire> seen;
        for (auto& w : wires) {
            if (w.first == w.second)
                throw std::invalid_argument("wire endpoints must be distinct, got {" +
                                            std::to_string(w.first) + ", " +
                                            std::to_string(w.second) + "}");
            if (w.first > w.second) std::swap(w.first, w.second);
            for (int id : {w.first, w.second})
                if (id < 1 || id > q_count)
                    throw std::invalid_argument("wire references unknown node " +
                                                std::to_string(id));
            if (!seen.insert(w).second)
                throw std::invalid_argument("duplicate wire {" + std::to_string(w.first) + ", " +
                                            std::to_string(w.second) + "}");
        }

        BooleanNetwork n;
        n.triodes_ = std::move(triodes);
        n.wires_ = std::move(wires);
        n.sites_.resize(q_count);
        for (int t = 0; t < t_count; ++t)
            for (int axis = 0; axis < 3; ++axis)
                n.sites_[n.triodes_[t][axis] - 1] = NodeSite{t, axis};
        return n;
    }

    int node_count() const { return 3 * static_cast<int>(triodes_.size()); }
    int triode_count() const { return static_cast<int>(triodes_.size()); }
    int wire_count() const { return static_cast<int>(wires_.size()); }

    const std::vector<Triode>& triodes() const { return triodes_; }
    const std::vector<Wire>& wires() const { return wires_; }

    NodeSite site_of(int node_id) const { return sites_.at(node_id - 1); }

    bool operator==(const BooleanNetwork& other) const {
        return triodes_ == other.triodes_ && wires_ == other.wires_;
    }

  private:
    BooleanNetwork() = default;
    std::vector<Triode> triodes_;
    std::vector<Wire> wires_;
    std::vector<NodeSite> sites_;
};

// Boolean assignment q_1 .. q_Q, stored 0-indexed.
struct Assignment {
    std::vector<std::uint8_t> bits;

    int bit(int node_id) const { return bits.at(node_id - 1); }

    std::string to_string() const {
        std::string s(bits.size(), '0');
        for (std::size_t i = 0; i < bits.size(); ++i) s[i] = bits[i] ? '1' : '0';
        return s;
    }

    static Assignment from_string(const std::string& s) {
        Assignment a;
        a.bits.reserve(s.size());
        for (char c : s) {
            if (c != '0' && c != '1')
                throw std::invalid_argument("assignment strings are 0/1 only");
            a.bits.push_back(c == '1');
        }
        return a;
    }

    bool operator==(const Assignment&) const = default;
};

inline bool check_triode(const Assignment& a, const Triode& t) {
    return a.bit(t[0]) + a.bit(t[1]) + a.bit(t[2]) == 2;
}

inline bool check_wire(const Assignment& a, const Wire& w) {
    return a.bit(w.first) == a.bit(w.second);
}

inline bool check_xor(const Assignment& a, const Triode& t) {
    return ((a.bit(t[0]) + a.bit(t[1]) + a.bit(t[2])) & 1) == 0;
}

inline bool satisfies(const BooleanNetwork& n, const Assignment& a, GateKind gates) {
    if (static_cast<int>(a.bits.size()) != n.node_count()) return false;
    for (const auto& t : n.triodes()) {
        const bool ok = gates == GateKind::triode ? check_triode(a, t) : check_xor(a, t);
        if (!ok) return false;
    }
    for (const auto& w : n.wires())
        if (!check_wire(a, w)) return false;
    return true;
}

constexpr int kEnumerationBound = 24;

// Exhaustive enumeration over all 2^Q assignments, lexicographic in
// (q_1, ..., q_Q). The classical oracle for every quantum-side result.
inline std::vector<Assignment> brute_force_solutions(const BooleanNetwork& n, GateKind gates,
                                                     int enumeration_bound = kEnumerationBound) {
    const int q = n.node_count();
    if (q > enumeration_bound)
        throw std::invalid_argument("Q = " + std::to_string(q) +
                                    " exceeds the enumeration bound " +
                                    std::to_string(enumeration_bound));
    std::vector<Assignment> out;
    Assignment a;
    a.bits.assign(q, 0);
    for (std::uint64_t m = 0; m < (std::uint64_t{1} << q); ++m) {
        for (int i = 0; i < q; ++i) a.bits[i] = (m >> (q - 1 - i)) & 1u;
        if (satisfies(n, a, gates)) out.push_back(a);
    }
    return out;
}

// Affine description of the XOR+wire solution set: a particular solution plus
// a GF(2) null-space basis. The system is homogeneous (all-zeros always
// solves it), so the particular solution is the zero assignment.
struct XorSolution {
    int num_vars = 0;
    Assignment particular;
    std::vector<Assignment> basis;  // reduced row-echelon order, one per free variable
    int dimension() const { return static_cast<int>(basis.size()); }
    std::uint64_t count() const { return std::uint64_t{1} << basis.size(); }
};

// Gaussian elimination over GF(2) on {triode parities, wire equalities}.
inline XorSolution solve_xor_network(const BooleanNetwork& n) {
    const int q = n.node_count();
    if (q > 63) throw std::invalid_argument("GF(2) solver supports Q <= 63");

    std::vector<std::uint64_t> rows;
    for (const auto& t : n.triodes()) {
        std::uint64_t r = 0;
        for (int id : t) r |= std::uint64_t{1} << (id - 1);
        rows.push_back(r);
    }
    for (const auto& w : n.wires())
        rows.push_back((std::uint64_t{1} << (w.first - 1)) | (std::uint64_t{1} << (w.second - 1)));

    // Reduced row echelon form; pivot_of[col] = row index or -1.
    std::vector<int> pivot_of(q, -1);
    int rank = 0;
    for (int col = 0; col < q && rank < static_cast<int>(rows.size()); ++col) {
        int pivot = -1;
        for (int r = rank; r < static_cast<int>(rows.size()); ++r)
            if (rows[r] >> col & 1) { pivot = r; break; }
        if (pivot < 0) continue;
        std::swap(rows[rank], rows[pivot]);
        for (int r = 0; r < static_cast<int>(rows.size()); ++r)
            if (r != rank && (rows[r] >> col & 1)) rows[r] ^= rows[rank];
        pivot_of[col] = rank;
        ++rank;
    }

    XorSolution sol;
    sol.num_vars = q;
    sol.particular.bits.assign(q, 0);
    for (int col = 0; col < q; ++col) {
        if (pivot_of[col] >= 0) continue;  // pivot column, not free
        Assignment v;
        v.bits.assign(q, 0);
        v.bits[col] = 1;
        // Each pivot variable equals the XOR of the free variables set in its row.
        for (int p = 0; p < q; ++p)
            if (pivot_of[p] >= 0 && (rows[pivot_of[p]] >> col & 1)) v.bits[p] = 1;
        sol.basis.push_back(std::move(v));
    }
    return sol;
}

// Expands the affine description; result sorted lexicographically to match
// brute_force_solutions order.
inline std::vector<Assignment> enumerate_xor_solutions(const XorSolution& sol,
                                                       int enumeration_bound = kEnumerationBound) {
    if (sol.dimension() > enumeration_bound)
        throw std::invalid_argument("solution space dimension " +
                                    std::to_string(sol.dimension()) +
                                    " exceeds the enumeration bound");
    std::vector<Assignment> out;
    const int d = sol.dimension();
    for (std::uint64_t m = 0; m < (std::uint64_t{1} << d); ++m) {
        Assignment a = sol.particular;
        for (int b = 0; b < d; ++b)
            if (m >> b & 1)
                for (int i = 0; i < sol.num_vars; ++i) a.bits[i] ^= sol.basis[b].bits[i];
        out.push_back(std::move(a));
    }
    std::sort(out.begin(), out.end(),
              [](const Assignment& x, const Assignment& y) { return x.bits < y.bits; });
    return out;
}

// ---------------------------------------------------------------------------
// File formats. JSON: {"triodes": [[...], ...], "wires": [[i, j], ...]};
// unknown keys rejected. Text mirror, one constraint per line:
//     triode 1 2 3
//     wire 3 5
// with '#' comments. Both serializers emit a canonical form that parses back
// to an equal network.
// ---------------------------------------------------------------------------

inline BooleanNetwork parse_network_json(const std::string& text) {
    nlohmann::json doc;
    try {
        doc = nlohmann::json::parse(text);
    } catch (const nlohmann::json::parse_error& e) {
        throw ParseError(std::string("invalid JSON: ") + e.what());
    }
    if (!doc.is_object()) throw ParseError("top-level JSON value must be an object");
    for (const auto& item : doc.items())
        if (item.key() != "triodes" && item.key() != "wires")
            throw ParseError("unknown key \"" + item.key() + "\"");
    if (!doc.contains("triodes")) throw ParseError("missing \"triodes\" key");

    std::vector<Triode> triodes;
    for (const auto& t : doc["triodes"]) {
        if (!t.is_array() || t.size() != 3)
            throw ParseError("each triode must be a 3-element array of node ids");
        triodes.push_back(Triode{t[0].get<int>(), t[1].get<int>(), t[2].get<int>()});
    }
    std::vector<Wire> wires;
    if (doc.contains("wires")) {
        for (const auto& w : doc["wires"]) {
            if (!w.is_array() || w.size() != 2)
                throw ParseError("each wire must be a 2-element array of node ids");
            wires.emplace_back(w[0].get<int>(), w[1].get<int>());
        }
    }
    try {
        return BooleanNetwork::make(std::move(triodes), std::move(wires));
    } catch (const std::invalid_argument& e) {
        throw ParseError(e.what());
    }
}

inline BooleanNetwork parse_network_text(const std::string& text) {
    std::vector<Triode> triodes;
    std::vector<Wire> wires;
    std::istringstream in(text);
    std::string line;
    int line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (auto hash = line.find('#'); hash != std::string::npos) line.resize(hash);
        std::istringstream ls(line);
        std::string keyword;
        if (!(ls >> keyword)) continue;  // blank line
        std::vector<int> ids;
        int id;
        while (ls >> id) ids.push_back(id);
        std::string trailing;
        if (ls.clear(), ls >> trailing)
            throw ParseError("unexpected token \"" + trailing + "\"", line_no);
        if (keyword == "triode") {
            if (ids.size() != 3) throw ParseError("triode takes exactly 3 node ids", line_no);
            triodes.push_back(Triode{ids[0], ids[1], ids[2]});
        } else if (keyword == "wire") {
            if (ids.size() != 2) throw ParseError("wire takes exactly 2 node ids", line_no);
            wires.emplace_back(ids[0], ids[1]);
        } else {
            throw ParseError("unknown keyword \"" + keyword + "\"", line_no);
        }
    }
    try {
        return BooleanNetwork::make(std::move(triodes), std::move(wires));
    } catch (const std::invalid_argument& e) {
        throw ParseError(e.what());
    }
}

// Sniffs the format: a document whose first non-space character is '{' is JSON.
inline BooleanNetwork parse_network(const std::string& text) {
    for (char c : text) {
        if (std::isspace(static_cast<unsigned char>(c))) continue;
        return c == '{' ? parse_network_json(text) : parse_network_text(text);
    }
    throw ParseError("empty network document");
}

inline std::string serialize_network_json(const BooleanNetwork& n) {
    nlohmann::ordered_json doc;
    doc["triodes"] = nlohmann::json::array();
    for (const auto& t : n.triodes()) doc["triodes"].push_back({t[0], t[1], t[2]});
    doc["wires"] = nlohmann::json::array();
    for (const auto& w : n.wires()) doc["wires"].push_back({w.first, w.second});
    return doc.dump(2) + "\n";
}

inline std::string serialize_network_text(const BooleanNetwork& n) {
    std::ostringstream out;
    for (const auto& t : n.triodes())
        out << "triode " << t[0] << ' ' << t[1] << ' ' << t[2] << '\n';
    for (const auto& w : n.wires()) out << "wire " << w.first << ' ' << w.second << '\n';
    return out.str();
}

// ---------------------------------------------------------------------------
// Seeded generation for tests and sweeps.
// ---------------------------------------------------------------------------

inline BooleanNetwork random_network(int t_count, int w_count, std::uint64_t seed) {
    if (t_count < 1) throw std::invalid_argument("need at least one triode");
    const int q = 3 * t_count;
    const int max_wires = q * (q - 1) / 2;
    if (w_count < 0 || w_count > max_wires)
        throw std::invalid_argument("wire count out of range");

    std::mt19937_64 rng(seed);
    std::vector<int> ids(q);
    for (int i = 0; i < q; ++i) ids[i] = i + 1;
    std::shuffle(ids.begin(), ids.end(), rng);

    std::vector<Triode> triodes;
    for (int t = 0; t < t_count; ++t)
        triodes.push_back(Triode{ids[3 * t], ids[3 * t + 1], ids[3 * t + 2]});

    std::vector<Wire> pool;
    pool.reserve(max_wires);
    for (int i = 1; i <= q; ++i)
        for (int j = i + 1; j <= q; ++j) pool.emplace_back(i, j);
    std::shuffle(pool.begin(), pool.end(), rng);
    pool.resize(w_count);

    return BooleanNetwork::make(std::move(triodes), std::move(pool));
}

// Retries nearby seeds until the triode-gate system has at least one solution.
inline BooleanNetwork random_solvable_network(int t_count, int w_count, std::uint64_t seed,
                                              int max_attempts = 1000) {
    for (int attempt = 0; attempt < max_attempts; ++attempt) {
        BooleanNetwork n = random_network(t_count, w_count, seed + 0x9e3779b97f4a7c15ull * attempt);
        if (!brute_force_solutions(n, GateKind::triode).empty()) return n;
    }
    throw std::runtime_error("no solvable network found after " + std::to_string(max_attempts) +
                             " attempts");
}

}  // namespace spinnet
