#pragma once

// The exchange format: one JSON document that can carry a ring, a matrix, a
// module, a complex, a filtration, or an explicit page with differential
// rules. Matrix entries use the textual element grammar of the ring. Parsing
// reports syntax errors with line/column and semantic errors with the
// offending field path; serialization is canonical (sorted keys, two-space
// indent) so identical inputs yield byte-identical output.

#include <json.hpp>

#include <optional>
#include <string>
#include <variant>

#include "dvrss/bg.hpp"
#include "dvrss/hodge.hpp"
#include "dvrss/spectral.hpp"
#include "dvrss/suites.hpp"

namespace dvrss {

using Json = nlohmann::json;

template <class R>
struct Document {
    R ring;
    std::optional<Matrix<R>> matrix;
    std::optional<FinModule> module;
    std::optional<FreeComplex<R>> complex;
    std::optional<FilteredComplex<R>> filtration;
    std::optional<Page<R>> page;
    std::vector<PageRule<R>> rules;
    std::map<long long, FinModule> claimed;
};

using AnyDocument =
    std::variant<Document<PLocalIntegers>, Document<LocalPolynomials>, Document<RamifiedQuadratic>>;

namespace io {

[[noreturn]] inline void semantic(const std::string& path, const std::string& msg)
{
    fail("semantic", path + ": " + msg);
}

inline void expect(bool ok, const std::string& path, const std::string& msg)
{
    if (!ok)
        semantic(path, msg);
}

inline Json parse_text(const std::string& text)
{
    try {
        return Json::parse(text);
    } catch (const Json::parse_error& e) {
        size_t offset = e.byte;
        long long line = 1, col = 1;
        for (size_t i = 0; i < offset && i < text.size(); ++i) {
            if (text[i] == '\n') {
                ++line;
                col = 1;
            } else {
                ++col;
            }
        }
        fail("syntax", "line " + std::to_string(line) + ", column " + std::to_string(col) + ": " +
                           e.what());
    }
}

inline long long get_int(const Json& j, const std::string& path)
{
    expect(j.is_number_integer(), path, "expected an integer");
    return j.get<long long>();
}

template <class R>
Matrix<R> parse_matrix(const R& ring, const Json& j, const std::string& path)
{
    expect(j.is_array(), path, "expected an array of rows");
    long long rows = static_cast<long long>(j.size());
    long long cols = rows == 0 ? 0 : static_cast<long long>(j[0].size());
    Matrix<R> m(rows, cols);
    for (long long i = 0; i < rows; ++i) {
        const Json& row = j[static_cast<size_t>(i)];
        expect(row.is_array() && static_cast<long long>(row.size()) == cols, path,
               "ragged matrix at row " + std::to_string(i));
        for (long long c = 0; c < cols; ++c) {
            const Json& cell = row[static_cast<size_t>(c)];
            expect(cell.is_string(), path + "[" + std::to_string(i) + "][" + std::to_string(c) + "]",
                   "matrix entries are element strings");
            try {
                m.at(i, c) = ring.parse(cell.get<std::string>());
            } catch (const Error& e) {
                fail(e.code, path + "[" + std::to_string(i) + "][" + std::to_string(c) + "]: " +
                                 e.what());
            }
        }
    }
    return m;
}

inline FinModule parse_fin_module(const Json& j, const std::string& path)
{
    expect(j.is_object(), path, "expected an object with free_rank/torsion");
    FinModule m;
    if (j.contains("free_rank"))
        m.free_rank = get_int(j["free_rank"], path + ".free_rank");
    if (j.contains("torsion")) {
        expect(j["torsion"].is_array(), path + ".torsion", "expected an array");
        for (const auto& e : j["torsion"]) {
            long long v = get_int(e, path + ".torsion[]");
            expect(v >= 1, path + ".torsion", "torsion exponents are positive");
            m.torsion.push_back(v);
        }
        std::sort(m.torsion.begin(), m.torsion.end());
    }
    expect(m.free_rank >= 0, path + ".free_rank", "free rank is nonnegative");
    return m;
}

template <class R>
FreeComplex<R> parse_complex(const R& ring, const Json& j, const std::string& path)
{
    expect(j.is_object(), path, "expected an object");
    expect(j.contains("ranks"), path, "missing ranks");
    long long lo = j.contains("lo") ? get_int(j["lo"], path + ".lo") : 0;
    std::vector<long long> ranks;
    for (const auto& e : j["ranks"])
        ranks.push_back(get_int(e, path + ".ranks[]"));
    std::vector<Matrix<R>> d;
    if (j.contains("d")) {
        expect(j["d"].is_array(), path + ".d", "expected an array of matrices");
        for (size_t k = 0; k < j["d"].size(); ++k)
            d.push_back(parse_matrix(ring, j["d"][k], path + ".d[" + std::to_string(k) + "]"));
    }
    try {
        return make_complex(ring, lo, std::move(ranks), std::move(d));
    } catch (const Error& e) {
        fail(e.code, path + ": " + e.what());
    }
}

template <class R>
FilteredComplex<R> parse_filtration(const R& ring, const FreeComplex<R>& C, const Json& j,
                                    const std::string& path)
{
    expect(j.is_object(), path, "expected an object");
    Orientation orientation = Orientation::decreasing;
    if (j.contains("orientation")) {
        std::string o = j["orientation"].get<std::string>();
        expect(o == "increasing" || o == "decreasing", path + ".orientation",
               "orientation is 'increasing' or 'decreasing'");
        orientation = o == "increasing" ? Orientation::increasing : Orientation::decreasing;
    }
    struct RawStep {
        long long index;
        std::map<long long, Matrix<R>> gens;
    };
    std::vector<RawStep> raw;
    if (j.contains("steps")) {
        expect(j["steps"].is_array(), path + ".steps", "expected an array");
        for (size_t s = 0; s < j["steps"].size(); ++s) {
            const Json& js = j["steps"][s];
            std::string spath = path + ".steps[" + std::to_string(s) + "]";
            expect(js.is_object() && js.contains("index") && js.contains("gens"), spath,
                   "each step carries index and gens");
            RawStep step;
            step.index = get_int(js["index"], spath + ".index");
            for (const auto& [key, val] : js["gens"].items()) {
                long long degree = 0;
                try {
                    degree = std::stoll(key);
                } catch (...) {
                    semantic(spath + ".gens", "degree keys are integers");
                }
                step.gens[degree] = parse_matrix(ring, val, spath + ".gens." + key);
            }
            raw.push_back(std::move(step));
        }
    }
    // translate user indices to the internal decreasing convention
    std::sort(raw.begin(), raw.end(), [&](const RawStep& a, const RawStep& b) {
        return orientation == Orientation::decreasing ? a.index < b.index : a.index > b.index;
    });
    for (size_t s = 0; s + 1 < raw.size(); ++s) {
        long long delta = orientation == Orientation::decreasing
                              ? raw[s + 1].index - raw[s].index
                              : raw[s].index - raw[s + 1].index;
        expect(delta == 1, path + ".steps", "step indices must be consecutive");
    }
    std::vector<std::map<long long, Matrix<R>>> steps;
    for (auto& r : raw) {
        // fill missing degrees with zero-column matrices
        for (long long i = C.lo; i <= C.hi(); ++i)
            if (!r.gens.count(i))
                r.gens[i] = mat::zero<R>(C.rank_at(i), 0);
        steps.push_back(std::move(r.gens));
    }
    long long p_min = 0;
    if (!raw.empty())
        p_min = (orientation == Orientation::decreasing ? raw.front().index : -raw.front().index) - 1;
    try {
        return make_filtered(ring, C, orientation, p_min, std::move(steps));
    } catch (const Error& e) {
        fail(e.code, path + ": " + e.what());
    }
}

template <class R>
Page<R> parse_page(const R& ring, const Json& j, const std::string& path,
                   std::vector<PageRule<R>>& rules)
{
    expect(j.is_object() && j.contains("spots"), path, "expected an object with spots");
    Page<R> page;
    page.r = j.contains("r") ? get_int(j["r"], path + ".r") : 1;
    for (size_t s = 0; s < j["spots"].size(); ++s) {
        const Json& js = j["spots"][s];
        std::string spath = path + ".spots[" + std::to_string(s) + "]";
        expect(js.is_object() && js.contains("p") && js.contains("q"), spath,
               "each spot carries p and q");
        Spot spot{get_int(js["p"], spath + ".p"), get_int(js["q"], spath + ".q")};
        typename Page<R>::Entry e;
        e.module = presented_from_invariants(ring, parse_fin_module(js, spath));
        if (js.contains("labels"))
            for (const auto& l : js["labels"])
                e.labels.push_back(l.get<std::string>());
        if (js.contains("twist"))
            e.twist = get_int(js["twist"], spath + ".twist");
        expect(page.spots.emplace(spot, std::move(e)).second, spath, "duplicate spot");
    }
    if (j.contains("differentials")) {
        std::map<long long, PageRule<R>> by_r;
        for (size_t s = 0; s < j["differentials"].size(); ++s) {
            const Json& jd = j["differentials"][s];
            std::string dpath = path + ".differentials[" + std::to_string(s) + "]";
            expect(jd.is_object() && jd.contains("from") && jd.contains("matrix"), dpath,
                   "each differential carries from and matrix");
            long long r = jd.contains("r") ? get_int(jd["r"], dpath + ".r") : page.r;
            expect(jd["from"].is_array() && jd["from"].size() == 2, dpath + ".from",
                   "from is a [p, q] pair");
            Spot from{get_int(jd["from"][0], dpath), get_int(jd["from"][1], dpath)};
            by_r[r].r = r;
            by_r[r].d[from] = parse_matrix(ring, jd["matrix"], dpath + ".matrix");
        }
        for (auto& [r, rule] : by_r)
            rules.push_back(std::move(rule));
    }
    return page;
}

template <class R>
Document<R> parse_typed(R ring, const Json& j)
{
    Document<R> doc{std::move(ring), {}, {}, {}, {}, {}, {}, {}};
    if (j.contains("matrix"))
        doc.matrix = parse_matrix(doc.ring, j["matrix"], "matrix");
    if (j.contains("module"))
        doc.module = parse_fin_module(j["module"], "module");
    if (j.contains("complex"))
        doc.complex = parse_complex(doc.ring, j["complex"], "complex");
    if (j.contains("filtration")) {
        expect(doc.complex.has_value(), "filtration", "a filtration needs a complex");
        doc.filtration = parse_filtration(doc.ring, *doc.complex, j["filtration"], "filtration");
    }
    if (j.contains("page"))
        doc.page = parse_page(doc.ring, j["page"], "page", doc.rules);
    if (j.contains("claimed")) {
        expect(j["claimed"].is_object(), "claimed", "expected an object keyed by degree");
        for (const auto& [key, val] : j["claimed"].items()) {
            long long n = 0;
            try {
                n = std::stoll(key);
            } catch (...) {
                semantic("claimed", "degree keys are integers");
            }
            doc.claimed[n] = parse_fin_module(val, "claimed." + key);
        }
    }
    return doc;
}

inline AnyDocument parse_document(const std::string& text)
{
    Json j = parse_text(text);
    expect(j.is_object() && j.contains("ring"), "ring", "document needs a ring block");
    const Json& jr = j["ring"];
    expect(jr.is_object() && jr.contains("kind") && jr.contains("p"), "ring",
           "ring block needs kind and p");
    std::string kind = jr["kind"].get<std::string>();
    long long p = get_int(jr["p"], "ring.p");
    expect(p >= 2, "ring.p", "p must be a prime");
    for (long long d = 2; d * d <= p; ++d)
        expect(p % d != 0, "ring.p", "p must be a prime");
    if (kind == PLocalIntegers::kind)
        return parse_typed(PLocalIntegers(p), j);
    if (kind == LocalPolynomials::kind)
        return parse_typed(LocalPolynomials(p), j);
    if (kind == RamifiedQuadratic::kind) {
        BigRat c(1);
        if (jr.contains("unit_multiplier")) {
            PLocalIntegers probe(p);
            try {
                c = probe.parse(jr["unit_multiplier"].get<std::string>());
            } catch (const Error& e) {
                fail(e.code, "ring.unit_multiplier: " + std::string(e.what()));
            }
        }
        try {
            return parse_typed(RamifiedQuadratic(p, c), j);
        } catch (const Error& e) {
            fail(e.code, "ring.unit_multiplier: " + std::string(e.what()));
        }
    }
    semantic("ring.kind", "unknown ring kind '" + kind + "'");
}

// ---------------------------------------------------------------------------
// serialization
// ---------------------------------------------------------------------------

template <class R>
Json ring_to_json(const R& ring)
{
    Json j;
    j["kind"] = R::kind;
    j["p"] = ring.residue_char();
    if constexpr (std::is_same_v<R, RamifiedQuadratic>) {
        PLocalIntegers probe(ring.p);
        j["unit_multiplier"] = probe.format(ring.unit_multiplier);
    }
    return j;
}

template <class R>
Json matrix_to_json(const R& ring, const Matrix<R>& m)
{
    Json rows = Json::array();
    for (long long i = 0; i < m.rows; ++i) {
        Json row = Json::array();
        for (long long c = 0; c < m.cols; ++c)
            row.push_back(ring.format(m.at(i, c)));
        rows.push_back(std::move(row));
    }
    return rows;
}

inline Json fin_module_to_json(const FinModule& m)
{
    Json j;
    j["free_rank"] = m.free_rank;
    j["torsion"] = m.torsion;
    return j;
}

template <class R>
Json complex_to_json(const R& ring, const FreeComplex<R>& C)
{
    Json j;
    j["lo"] = C.lo;
    j["ranks"] = C.ranks;
    Json d = Json::array();
    for (const auto& m : C.d)
        d.push_back(matrix_to_json(ring, m));
    j["d"] = std::move(d);
    return j;
}

template <class R>
Json filtration_to_json(const R& ring, const FilteredComplex<R>& fc)
{
    Json j;
    j["orientation"] = fc.orientation == Orientation::decreasing ? "decreasing" : "increasing";
    Json steps = Json::array();
    for (size_t s = 0; s < fc.steps.size(); ++s) {
        long long p = fc.p_min + 1 + static_cast<long long>(s);
        Json js;
        js["index"] = fc.user_index(p);
        Json gens;
        for (const auto& [degree, m] : fc.steps[s])
            gens[std::to_string(degree)] = matrix_to_json(ring, m);
        js["gens"] = std::move(gens);
        steps.push_back(std::move(js));
    }
    j["steps"] = std::move(steps);
    return j;
}

template <class R>
Json page_to_json(const R& ring, const Page<R>& page)
{
    Json j;
    j["r"] = page.r;
    Json spots = Json::array();
    for (const auto& [spot, entry] : page.spots) {
        FinModule m = invariants(ring, entry.module);
        Json js = fin_module_to_json(m);
        js["p"] = spot.first;
        js["q"] = spot.second;
        if (!entry.labels.empty())
            js["labels"] = entry.labels;
        if (entry.twist)
            js["twist"] = *entry.twist;
        spots.push_back(std::move(js));
    }
    j["spots"] = std::move(spots);
    Json diffs = Json::array();
    for (const auto& [spot, m] : page.diff) {
        Json jd;
        jd["r"] = page.r;
        jd["from"] = Json::array({spot.first, spot.second});
        jd["matrix"] = matrix_to_json(ring, m);
        diffs.push_back(std::move(jd));
    }
    if (!diffs.empty())
        j["differentials"] = std::move(diffs);
    return j;
}

template <class R>
Json document_to_json(const Document<R>& doc)
{
    Json j;
    j["ring"] = ring_to_json(doc.ring);
    if (doc.matrix)
        j["matrix"] = matrix_to_json(doc.ring, *doc.matrix);
    if (doc.module)
        j["module"] = fin_module_to_json(*doc.module);
    if (doc.complex)
        j["complex"] = complex_to_json(doc.ring, *doc.complex);
    if (doc.filtration)
        j["filtration"] = filtration_to_json(doc.ring, *doc.filtration);
    if (doc.page) {
        j["page"] = page_to_json(doc.ring, *doc.page);
        Json diffs = Json::array();
        for (const auto& rule : doc.rules)
            for (const auto& [spot, m] : rule.d) {
                Json jd;
                jd["r"] = rule.r;
                jd["from"] = Json::array({spot.first, spot.second});
                jd["matrix"] = matrix_to_json(doc.ring, m);
                diffs.push_back(std::move(jd));
            }
        if (!diffs.empty())
            j["page"]["differentials"] = std::move(diffs);
    }
    if (!doc.claimed.empty()) {
        Json claimed;
        for (const auto& [n, m] : doc.claimed)
            claimed[std::to_string(n)] = fin_module_to_json(m);
        j["claimed"] = std::move(claimed);
    }
    return j;
}

inline Json degeneracy_report_to_json(const DegeneracyReport& rep)
{
    Json j;
    j["verdict"] = rep.verdict();
    j["degenerate"] = rep.degenerate;
    j["saturated"] = rep.saturated;
    j["split"] = rep.split;
    Json degrees;
    for (const auto& [i, flags] : rep.degrees) {
        Json jf;
        jf["degenerate"] = flags.degenerate;
        jf["saturated"] = flags.saturated;
        jf["split"] = flags.split;
        jf["rank_additive"] = flags.rank_additive;
        if (flags.saturated_torsion)
            jf["saturated_torsion"] = *flags.saturated_torsion;
        if (flags.split_torsion)
            jf["split_torsion"] = *flags.split_torsion;
        degrees[std::to_string(i)] = std::move(jf);
    }
    j["degrees"] = std::move(degrees);
    if (rep.first_failure) {
        Json w;
        w["degree"] = rep.first_failure->degree;
        w["filtration_index"] = rep.first_failure->filt_index;
        w["what"] = rep.first_failure->what;
        j["first_failure"] = std::move(w);
    }
    return j;
}

inline Json hodge_table_to_json(const HodgeTable& t)
{
    Json entries = Json::array();
    for (const auto& [ij, v] : t.entries) {
        Json e;
        e["i"] = ij.first;
        e["j"] = ij.second;
        e["value"] = v;
        entries.push_back(std::move(e));
    }
    Json j;
    j["entries"] = std::move(entries);
    Json prov = Json::array();
    for (const auto& p : t.provenance) {
        Json e;
        e["n"] = p.n;
        e["i"] = p.i;
        e["dim"] = p.image_dim;
        prov.push_back(std::move(e));
    }
    j["provenance"] = std::move(prov);
    return j;
}

inline Json ledger_to_json(const ConditionLedger& led)
{
    Json j;
    j["threshold"] = Json{{"p", led.thr.p}, {"e", led.thr.e}, {"T", led.thr.T}};
    j["C1"] = tri_name(led.c1);
    j["C2"] = tri_name(led.c2);
    j["C3"] = tri_name(led.c3);
    j["C4"] = tri_name(led.c4);
    j["C5"] = tri_name(led.c5);
    j["C6"] = tri_name(led.c6);
    j["C7"] = tri_name(led.c7);
    j["C8"] = tri_name(led.c8);
    j["window"] = led.window;
    j["implications_ok"] = led.implications_ok;
    if (led.beta_consistent)
        j["beta_consistent"] = *led.beta_consistent;
    j["notes"] = led.notes;
    return j;
}

inline Json suite_result_to_json(const SuiteResult& res)
{
    Json j;
    j["suite"] = res.suite;
    j["seed"] = res.seed;
    j["count"] = res.count;
    j["violations"] = res.violations;
    j["digests"] = res.digests;
    j["failures"] = res.failures;
    return j;
}

// canonical rendering used everywhere a byte-stable transcript matters
inline std::string canonical(const Json& j) { return j.dump(2) + "\n"; }

// ---------------------------------------------------------------------------
// SVG export of a characteristic polygon
// ---------------------------------------------------------------------------

inline std::string polygon_svg(const CharPolygon& poly)
{
    const long long unit = 40, margin = 20;
    long long w = std::max<long long>(poly.width(), 1);
    long long h = std::max<long long>(poly.height(), 1);
    long long view_w = w * unit + 2 * margin, view_h = h * unit + 2 * margin;
    auto X = [&](long long x) { return margin + x * unit; };
    auto Y = [&](long long y) { return view_h - margin - y * unit; };
    std::string s;
    s += "<svg xmlns=\"http://www.w3.org/2000/svg\" version=\"1.1\" width=\"" +
         std::to_string(view_w) + "\" height=\"" + std::to_string(view_h) + "\">\n";
    s += "  <polyline fill=\"none\" stroke=\"black\" stroke-width=\"2\" points=\"";
    for (const auto& [x, y] : poly.vertices())
        s += std::to_string(X(x)) + "," + std::to_string(Y(y)) + " ";
    s += "\"/>\n";
    for (const auto& [x, y] : poly.vertices())
        s += "  <circle cx=\"" + std::to_string(X(x)) + "\" cy=\"" + std::to_string(Y(y)) +
             "\" r=\"3\" fill=\"black\"/>\n";
    s += "</svg>\n";
    return s;
}

}  // namespace io

}  // namespace dvrss
