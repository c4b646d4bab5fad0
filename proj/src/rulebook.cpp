#include "frtb/rulebook.hpp"

#include "json_util.hpp"

#include <algorithm>
#include <cmath>
#include <set>
#include <sstream>

namespace frtb {

using detail::integer;
using detail::json;
using detail::member;
using detail::number;
using detail::text;

namespace {

constexpr double kTenorEps = 1e-9;

std::string fmt(double v) {
    std::ostringstream ss;
    ss.precision(17);
    ss << v;
    return ss.str();
}

std::string bucket_name(RiskClass rc, int id) {
    return std::string(to_string(rc)) + " bucket " + std::to_string(id);
}

BucketSelector read_selector(const json& j, const std::string& where) {
    BucketSelector sel;
    if (!j.is_object())
        throw ParseError(where, "expected an object");
    if (auto it = j.find("currency"); it != j.end())
        sel.currency = text(*it, where + ".currency");
    if (auto it = j.find("economy"); it != j.end())
        sel.economy = text(*it, where + ".economy");
    if (auto it = j.find("size"); it != j.end())
        sel.size = text(*it, where + ".size");
    if (auto it = j.find("sectors"); it != j.end()) {
        if (!it->is_array())
            throw ParseError(where + ".sectors", "expected an array");
        for (std::size_t i = 0; i < it->size(); ++i)
            sel.sectors.push_back(text((*it)[i], where + ".sectors[" + std::to_string(i) + "]"));
    }
    if (auto it = j.find("residual"); it != j.end()) {
        if (!it->is_boolean())
            throw ParseError(where + ".residual", "expected a boolean");
        sel.residual = it->get<bool>();
    }
    return sel;
}

json write_selector(const BucketSelector& sel) {
    json j = json::object();
    if (!sel.currency.empty())
        j["currency"] = sel.currency;
    if (!sel.economy.empty())
        j["economy"] = sel.economy;
    if (!sel.size.empty())
        j["size"] = sel.size;
    if (!sel.sectors.empty())
        j["sectors"] = sel.sectors;
    if (sel.residual)
        j["residual"] = true;
    return j;
}

RiskClass read_class(const json& j, const std::string& where) {
    try {
        return parse_risk_class(text(j, where));
    } catch (const InputError& e) {
        throw ParseError(where, e.what());
    }
}

const json& array_member(const json& obj, const char* key) {
    const json& arr = member(obj, key, "rulebook");
    if (!arr.is_array())
        throw ParseError(std::string("rulebook.") + key, "expected an array");
    return arr;
}

} // namespace

const Bucket* Rulebook::find_bucket(RiskClass rc, int id) const {
    for (const auto& b : buckets)
        if (b.risk_class == rc && b.id == id)
            return &b;
    return nullptr;
}

const Bucket& Rulebook::bucket(RiskClass rc, int id) const {
    if (const Bucket* b = find_bucket(rc, id))
        return *b;
    throw InputError("unknown " + bucket_name(rc, id));
}

std::vector<const Bucket*> Rulebook::buckets_of(RiskClass rc) const {
    std::vector<const Bucket*> out;
    for (const auto& b : buckets)
        if (b.risk_class == rc)
            out.push_back(&b);
    return out;
}

bool Rulebook::on_grid(double tenor) const {
    return std::any_of(tenor_grid.begin(), tenor_grid.end(),
                       [&](double g) { return std::abs(g - tenor) <= kTenorEps; });
}

std::vector<std::string> validate(const Rulebook& rb) {
    std::vector<std::string> v;
    auto in_unit = [](double x) { return std::isfinite(x) && x >= 0.0 && x <= 1.0; };
    auto in_corr = [](double x) { return std::isfinite(x) && x >= -1.0 && x <= 1.0; };

    if (rb.version.empty())
        v.push_back("version: must not be empty");

    if (rb.tenor_grid.empty())
        v.push_back("tenor_grid: must not be empty");
    for (std::size_t i = 0; i < rb.tenor_grid.size(); ++i) {
        const double t = rb.tenor_grid[i];
        if (!(t > 0.0))
            v.push_back("tenor_grid[" + std::to_string(i) + "]: tenor " + fmt(t) + " is not positive");
        if (i > 0 && !(t > rb.tenor_grid[i - 1]))
            v.push_back("tenor_grid[" + std::to_string(i) + "]: grid is not strictly increasing");
    }

    std::set<std::pair<RiskClass, int>> seen;
    for (const auto& b : rb.buckets) {
        const std::string name = bucket_name(b.risk_class, b.id);
        if (b.id <= 0)
            v.push_back(name + ": id must be a positive integer");
        if (!seen.insert({b.risk_class, b.id}).second)
            v.push_back(name + ": duplicate bucket id");
        if (b.risk_class == RiskClass::GIRR) {
            if (b.risk_weight)
                v.push_back(name + ": GIRR buckets take risk_weights_by_tenor, not a scalar risk_weight");
            for (double t : rb.tenor_grid) {
                auto it = std::find_if(b.tenor_weights.begin(), b.tenor_weights.end(),
                                       [&](const TenorWeight& tw) { return std::abs(tw.tenor - t) <= kTenorEps; });
                if (it == b.tenor_weights.end())
                    v.push_back(name + ": missing risk weight for tenor " + fmt(t));
            }
            for (const auto& tw : b.tenor_weights) {
                if (!rb.on_grid(tw.tenor))
                    v.push_back(name + ": tenor " + fmt(tw.tenor) + " is not on the tenor grid");
                if (!in_unit(tw.weight))
                    v.push_back(name + ": risk weight " + fmt(tw.weight) + " at tenor " + fmt(tw.tenor) +
                                " outside [0, 1]");
            }
        } else {
            if (!b.risk_weight)
                v.push_back(name + ": missing risk_weight");
            else if (!in_unit(*b.risk_weight))
                v.push_back(name + ": risk weight " + fmt(*b.risk_weight) + " outside [0, 1]");
            if (!b.tenor_weights.empty())
                v.push_back(name + ": risk_weights_by_tenor is only valid for GIRR");
        }
    }

    for (const auto& [key, rho] : rb.correlations.intra) {
        const std::string name = bucket_name(key.first, key.second);
        if (!rb.find_bucket(key.first, key.second))
            v.push_back("intra correlation for unknown " + name);
        if (!in_corr(rho))
            v.push_back("intra correlation for " + name + ": " + fmt(rho) + " outside [-1, 1]");
    }

    for (const auto& [key, gamma] : rb.correlations.cross) {
        const auto& [rc, b, c] = key;
        const std::string pair =
            std::string(to_string(rc)) + " (" + std::to_string(b) + ", " + std::to_string(c) + ")";
        if (b == c)
            v.push_back("cross correlation " + pair + ": a bucket cannot be paired with itself");
        if (!rb.find_bucket(rc, b) || !rb.find_bucket(rc, c))
            v.push_back("cross correlation " + pair + ": unknown bucket");
        if (!in_corr(gamma))
            v.push_back("cross correlation " + pair + ": " + fmt(gamma) + " outside [-1, 1]");
        if (b < c) {
            auto rev = rb.correlations.cross.find({rc, c, b});
            if (rev == rb.correlations.cross.end())
                v.push_back("cross correlation " + pair + ": reverse order missing");
            else if (rev->second != gamma)
                v.push_back("cross correlation " + pair + ": asymmetric (" + fmt(gamma) + " vs " +
                            fmt(rev->second) + ")");
        } else if (b > c && !rb.correlations.cross.count({rc, c, b})) {
            v.push_back("cross correlation " + pair + ": reverse order missing");
        }
    }

    const auto& gp = rb.correlations.girr_tenor_params;
    if (!(gp.floor > 0.0 && gp.floor < 1.0))
        v.push_back("girr_tenor_params.floor: " + fmt(gp.floor) + " outside (0, 1)");
    if (!(gp.theta > 0.0) || !std::isfinite(gp.theta))
        v.push_back("girr_tenor_params.theta: must be positive");

    const auto& sr = rb.scenario_rules;
    if (!(sr.high_scale > 0.0))
        v.push_back("scenario_rules.high.scale: must be positive");
    if (!(sr.high_cap > 0.0 && sr.high_cap <= 1.0))
        v.push_back("scenario_rules.high.cap: must lie in (0, 1]");
    if (!(sr.low_floor_scale >= 0.0 && sr.low_floor_scale <= 1.0))
        v.push_back("scenario_rules.low.floor_scale: must lie in [0, 1]");
    return v;
}

Rulebook load_rulebook(std::string_view source) {
    const json doc = detail::parse_json(source);
    if (!doc.is_object())
        throw ParseError("line 1, column 1", "rulebook must be an object");

    Rulebook rb;
    std::vector<std::string> violations;

    rb.version = text(member(doc, "version", "rulebook"), "rulebook.version");

    const json& grid = array_member(doc, "tenor_grid");
    for (std::size_t i = 0; i < grid.size(); ++i)
        rb.tenor_grid.push_back(number(grid[i], "tenor_grid[" + std::to_string(i) + "]"));

    const json& buckets = array_member(doc, "buckets");
    for (std::size_t i = 0; i < buckets.size(); ++i) {
        const std::string where = "buckets[" + std::to_string(i) + "]";
        const json& jb = buckets[i];
        Bucket b;
        b.risk_class = read_class(member(jb, "risk_class", where), where + ".risk_class");
        b.id = integer(member(jb, "id", where), where + ".id");
        if (auto it = jb.find("description"); it != jb.end())
            b.description = text(*it, where + ".description");
        if (auto it = jb.find("risk_weight"); it != jb.end())
            b.risk_weight = number(*it, where + ".risk_weight");
        if (auto it = jb.find("risk_weights_by_tenor"); it != jb.end()) {
            if (!it->is_array())
                throw ParseError(where + ".risk_weights_by_tenor", "expected an array");
            for (std::size_t k = 0; k < it->size(); ++k) {
                const std::string w = where + ".risk_weights_by_tenor[" + std::to_string(k) + "]";
                b.tenor_weights.push_back(
                    {number(member((*it)[k], "tenor", w), w + ".tenor"), number(member((*it)[k], "weight", w), w + ".weight")});
            }
        }
        if (auto it = jb.find("match"); it != jb.end())
            b.selector = read_selector(*it, where + ".match");
        rb.buckets.push_back(std::move(b));
    }

    if (auto it = doc.find("intra_correlations"); it != doc.end()) {
        if (!it->is_array())
            throw ParseError("rulebook.intra_correlations", "expected an array");
        for (std::size_t i = 0; i < it->size(); ++i) {
            const std::string where = "intra_correlations[" + std::to_string(i) + "]";
            const json& e = (*it)[i];
            const RiskClass rc = read_class(member(e, "risk_class", where), where + ".risk_class");
            const int bucket = integer(member(e, "bucket", where), where + ".bucket");
            const double rho = number(member(e, "rho", where), where + ".rho");
            if (!rb.correlations.intra.emplace(std::pair{rc, bucket}, rho).second)
                violations.push_back("intra correlation for " + bucket_name(rc, bucket) + ": duplicate entry");
        }
    }

    if (auto it = doc.find("cross_correlations"); it != doc.end()) {
        if (!it->is_array())
            throw ParseError("rulebook.cross_correlations", "expected an array");
        for (std::size_t i = 0; i < it->size(); ++i) {
            const std::string where = "cross_correlations[" + std::to_string(i) + "]";
            const json& e = (*it)[i];
            const RiskClass rc = read_class(member(e, "risk_class", where), where + ".risk_class");
            const int b = integer(member(e, "b", where), where + ".b");
            const int c = integer(member(e, "c", where), where + ".c");
            const double gamma = number(member(e, "gamma", where), where + ".gamma");
            if (!rb.correlations.cross.emplace(std::tuple{rc, b, c}, gamma).second)
                violations.push_back("cross correlation " + std::string(to_string(rc)) + " (" + std::to_string(b) +
                                     ", " + std::to_string(c) + "): duplicate entry");
        }
        // A pair listed once applies in both orders.
        std::vector<std::pair<std::tuple<RiskClass, int, int>, double>> reversed;
        for (const auto& [key, gamma] : rb.correlations.cross) {
            const auto& [rc, b, c] = key;
            if (!rb.correlations.cross.count({rc, c, b}))
                reversed.push_back({{rc, c, b}, gamma});
        }
        for (auto& [key, gamma] : reversed)
            rb.correlations.cross.emplace(key, gamma);
    }

    const json& gp = member(doc, "girr_tenor_params", "rulebook");
    rb.correlations.girr_tenor_params.theta = number(member(gp, "theta", "girr_tenor_params"), "girr_tenor_params.theta");
    rb.correlations.girr_tenor_params.floor = number(member(gp, "floor", "girr_tenor_params"), "girr_tenor_params.floor");

    if (auto it = doc.find("scenario_rules"); it != doc.end()) {
        auto& sr = rb.scenario_rules;
        if (auto h = it->find("high"); h != it->end()) {
            sr.high_scale = number(member(*h, "scale", "scenario_rules.high"), "scenario_rules.high.scale");
            sr.high_cap = number(member(*h, "cap", "scenario_rules.high"), "scenario_rules.high.cap");
        }
        if (auto l = it->find("low"); l != it->end()) {
            sr.low_scale = number(member(*l, "scale", "scenario_rules.low"), "scenario_rules.low.scale");
            sr.low_shift = number(member(*l, "shift", "scenario_rules.low"), "scenario_rules.low.shift");
            sr.low_floor_scale =
                number(member(*l, "floor_scale", "scenario_rules.low"), "scenario_rules.low.floor_scale");
        }
    }

    auto more = validate(rb);
    violations.insert(violations.end(), more.begin(), more.end());
    if (!violations.empty())
        throw ValidationError(std::move(violations));
    return rb;
}

Rulebook load_rulebook_file(const std::string& path) {
    return load_rulebook(detail::read_file(path));
}

json to_json(const Rulebook& rb) {
    json doc;
    doc["version"] = rb.version;
    doc["tenor_grid"] = rb.tenor_grid;
    json buckets = json::array();
    for (const auto& b : rb.buckets) {
        json jb;
        jb["risk_class"] = to_string(b.risk_class);
        jb["id"] = b.id;
        jb["description"] = b.description;
        if (b.risk_weight)
            jb["risk_weight"] = *b.risk_weight;
        if (!b.tenor_weights.empty()) {
            json tw = json::array();
            for (const auto& w : b.tenor_weights)
                tw.push_back({{"tenor", w.tenor}, {"weight", w.weight}});
            jb["risk_weights_by_tenor"] = std::move(tw);
        }
        jb["match"] = write_selector(b.selector);
        buckets.push_back(std::move(jb));
    }
    doc["buckets"] = std::move(buckets);

    json intra = json::array();
    for (const auto& [key, rho] : rb.correlations.intra)
        intra.push_back({{"risk_class", to_string(key.first)}, {"bucket", key.second}, {"rho", rho}});
    doc["intra_correlations"] = std::move(intra);

    json cross = json::array();
    for (const auto& [key, gamma] : rb.correlations.cross) {
        const auto& [rc, b, c] = key;
        if (b < c)
            cross.push_back({{"risk_class", to_string(rc)}, {"b", b}, {"c", c}, {"gamma", gamma}});
    }
    doc["cross_correlations"] = std::move(cross);

    doc["girr_tenor_params"] = {{"theta", rb.correlations.girr_tenor_params.theta},
                                {"floor", rb.correlations.girr_tenor_params.floor}};
    const auto& sr = rb.scenario_rules;
    doc["scenario_rules"] = {
        {"high", {{"scale", sr.high_scale}, {"cap", sr.high_cap}}},
        {"low", {{"scale", sr.low_scale}, {"shift", sr.low_shift}, {"floor_scale", sr.low_floor_scale}}}};
    return doc;
}

std::string serialize(const Rulebook& rb) {
    return to_json(rb).dump(2) + "\n";
}

double apply_scenario(double base, CorrelationScenario scenario, const ScenarioRules& rules) {
    switch (scenario) {
    case CorrelationScenario::Medium:
        return base;
    case CorrelationScenario::High:
        return std::clamp(rules.high_scale * base, -1.0, rules.high_cap);
    case CorrelationScenario::Low:
        return std::clamp(std::max(rules.low_scale * base + rules.low_shift, rules.low_floor_scale * base), -1.0, 1.0);
    }
    return base;
}

double girr_tenor_correlation(double tenor_k, double tenor_l, const GirrTenorParams& params) {
    if (!(tenor_k > 0.0) || !(tenor_l > 0.0))
        throw InputError("GIRR tenors must be positive (got " + fmt(tenor_k) + ", " + fmt(tenor_l) + ")");
    if (tenor_k == tenor_l)
        return 1.0;
    const double gap = std::abs(tenor_k - tenor_l) / std::min(tenor_k, tenor_l);
    return std::max(std::exp(-params.theta * gap), params.floor);
}

double risk_weight(const Rulebook& rb, RiskClass rc, int bucket, std::optional<double> tenor) {
    const Bucket& b = rb.bucket(rc, bucket);
    if (rc != RiskClass::GIRR) {
        if (tenor)
            throw InputError(bucket_name(rc, bucket) + ": tenor given for a non-GIRR risk weight");
        return *b.risk_weight;
    }
    if (!tenor)
        throw InputError(bucket_name(rc, bucket) + ": GIRR risk weight requires a tenor");
    for (const auto& tw : b.tenor_weights)
        if (std::abs(tw.tenor - *tenor) <= kTenorEps)
            return tw.weight;
    throw InputError(bucket_name(rc, bucket) + ": tenor " + fmt(*tenor) + " is not on the tenor grid");
}

double cross_correlation(const Rulebook& rb, RiskClass rc, int b, int c, CorrelationScenario scenario) {
    if (b == c)
        throw InputError("cross correlation requires distinct buckets (got " + std::to_string(b) + " twice)");
    auto it = rb.correlations.cross.find({rc, b, c});
    if (it == rb.correlations.cross.end())
        throw InputError("no cross correlation tabulated for " + std::string(to_string(rc)) + " buckets (" +
                         std::to_string(b) + ", " + std::to_string(c) + ")");
    return apply_scenario(it->second, scenario, rb.scenario_rules);
}

double intra_correlation(const Rulebook& rb, RiskClass rc, int bucket, const RiskFactorKey& k,
                         const RiskFactorKey& l, CorrelationScenario scenario) {
    if (k.risk_class != rc || l.risk_class != rc || k.bucket != bucket || l.bucket != bucket)
        throw InputError("intra correlation: factors " + describe(k) + " and " + describe(l) + " are not both in " +
                         bucket_name(rc, bucket));
    if (k == l)
        return 1.0;
    if (rc == RiskClass::GIRR) {
        if (!k.tenor || !l.tenor)
            throw InputError("intra correlation: GIRR factors need tenors");
        const double rho = girr_tenor_correlation(*k.tenor, *l.tenor, rb.correlations.girr_tenor_params);
        return apply_scenario(rho, scenario, rb.scenario_rules);
    }
    auto it = rb.correlations.intra.find({rc, bucket});
    if (it == rb.correlations.intra.end())
        throw InputError("no intra-bucket correlation tabulated for " + bucket_name(rc, bucket));
    return apply_scenario(it->second, scenario, rb.scenario_rules);
}

} // namespace frtb
