#include "ampcon/json_io.hpp"

#include <charconv>
#include <fstream>
#include <sstream>

namespace ampcon {

std::string format_double(double v) {
    char buf[64];
    const auto res = std::to_chars(buf, buf + sizeof(buf), v);
    return std::string(buf, res.ptr);
}

namespace {

Json complex_list(const Eigen::VectorXcd& v) {
    Json out = Json::array();
    for (Eigen::Index i = 0; i < v.size(); ++i) out.push_back({v[i].real(), v[i].imag()});
    return out;
}

Eigen::VectorXcd complex_list_from(const Json& j) {
    Eigen::VectorXcd v(j.size());
    for (std::size_t i = 0; i < j.size(); ++i)
        v[static_cast<Eigen::Index>(i)] = {j[i][0].get<double>(), j[i][1].get<double>()};
    return v;
}

}  // namespace

Json constellation_to_json(const Constellation& c) {
    Json j;
    j["M"] = c.order();
    j["amplitude_bound"] = c.amplitude_bound;
    Json rings = Json::array();
    if (c.params) {
        for (int l = 0; l < c.params->rings.ring_count(); ++l) {
            Json ring;
            ring["n"] = c.params->rings.points_per_ring[l];
            ring["r"] = c.params->radii[l];
            ring["omega"] = c.params->phases[l];
            rings.push_back(ring);
        }
    }
    j["rings"] = rings;
    j["points"] = complex_list(c.points);
    j["bit_map"] = c.bit_map;
    return j;
}

Constellation constellation_from_json(const Json& j) {
    Constellation c;
    c.amplitude_bound = j.at("amplitude_bound").get<double>();
    c.points = complex_list_from(j.at("points"));
    c.bit_map = j.at("bit_map").get<std::vector<std::uint32_t>>();
    const auto& rings = j.at("rings");
    if (!rings.empty()) {
        ApskParams p;
        p.amplitude_bound = c.amplitude_bound;
        for (const auto& ring : rings) {
            p.rings.points_per_ring.push_back(ring.at("n").get<int>());
            p.radii.push_back(ring.at("r").get<double>());
            p.phases.push_back(ring.at("omega").get<double>());
        }
        c.params = std::move(p);
    }
    if (j.at("M").get<int>() != c.order())
        throw std::invalid_argument("constellation_from_json: M does not match the point count");
    return c;
}

Json beam_vector_to_json(const BeamVector& f) {
    Json j;
    j["n_x"] = f.n_x;
    j["n_y"] = f.n_y;
    j["fx"] = f.fx ? complex_list(*f.fx) : Json::array();
    j["fy"] = f.fy ? complex_list(*f.fy) : Json::array();
    j["f"] = complex_list(f.values);
    return j;
}

BeamVector beam_vector_from_json(const Json& j) {
    BeamVector f;
    f.n_x = j.at("n_x").get<int>();
    f.n_y = j.at("n_y").get<int>();
    if (!j.at("fx").empty()) f.fx = complex_list_from(j.at("fx"));
    if (!j.at("fy").empty()) f.fy = complex_list_from(j.at("fy"));
    if (j.contains("f") && !j.at("f").empty()) {
        f.values = complex_list_from(j.at("f"));
    } else if (f.fx && f.fy) {
        f.values.resize(f.n_x * f.n_y);
        for (int a = 0; a < f.n_x; ++a) f.values.segment(a * f.n_y, f.n_y) = (*f.fx)[a] * (*f.fy);
    } else {
        throw std::invalid_argument("beam_vector_from_json: neither factors nor dense values present");
    }
    if (f.values.size() != static_cast<Eigen::Index>(f.n_x) * f.n_y)
        throw std::invalid_argument("beam_vector_from_json: length does not match n_x * n_y");
    double off_unit = 0.0;
    for (Eigen::Index i = 0; i < f.values.size(); ++i)
        off_unit = std::max(off_unit, std::abs(std::abs(f.values[i]) - 1.0));
    f.contract = off_unit <= 1e-9 ? ModulusContract::UnitModulus : ModulusContract::AmplitudeBounded;
    return f;
}

Json range_to_json(const AngularRange& r) {
    Json j;
    j["x"] = {r.x_lo, r.x_hi};
    j["y"] = {r.y_lo, r.y_hi};
    return j;
}

AngularRange range_from_json(const Json& j) {
    AngularRange r;
    r.x_lo = j.at("x")[0].get<double>();
    r.x_hi = j.at("x")[1].get<double>();
    r.y_lo = j.at("y")[0].get<double>();
    r.y_hi = j.at("y")[1].get<double>();
    r.validate();
    return r;
}

Json metrics_to_json(const PatternMetrics& m) {
    Json j;
    j["ripple_factor"] = m.ripple_factor;
    j["v_mean"] = m.v_mean;
    j["in_band_power"] = m.in_band_power;
    j["power_ratio"] = m.power_ratio;
    return j;
}

std::string ber_curve_csv(const BerCurve& curve) {
    std::string out = "ebn0_db,ber,symbols,errors\n";
    for (const auto& p : curve.points) {
        out += format_double(p.ebn0_db);
        out += ',';
        out += format_double(p.ber);
        out += ',';
        out += std::to_string(p.symbols);
        out += ',';
        out += std::to_string(p.errors);
        out += '\n';
    }
    return out;
}

std::string cdf_csv(const std::vector<std::pair<double, double>>& cdf) {
    std::string out = "amp_db,cdf\n";
    for (const auto& [db, p] : cdf) {
        out += format_double(db);
        out += ',';
        out += format_double(p);
        out += '\n';
    }
    return out;
}

std::string diagnostics_csv(const CmpimDiagnostics& d) {
    std::string out = "iter,min_objective,argmin_psi\n";
    for (std::size_t i = 0; i < d.min_objective.size(); ++i) {
        out += std::to_string(i);
        out += ',';
        out += format_double(d.min_objective[i]);
        out += ',';
        out += format_double(d.argmin_psi[i]);
        out += '\n';
    }
    return out;
}

void write_text_file(const std::filesystem::path& path, const std::string& content) {
    std::ofstream f(path, std::ios::binary);
    if (!f) throw std::runtime_error("cannot open for writing: " + path.string());
    f << content;
    if (!f) throw std::runtime_error("write failed: " + path.string());
}

std::string read_text_file(const std::filesystem::path& path) {
    std::ifstream f(path, std::ios::binary);
    if (!f) throw std::runtime_error("cannot open: " + path.string());
    std::ostringstream ss;
    ss << f.rdbuf();
    return ss.str();
}

Json read_json_file(const std::filesystem::path& path) {
    return Json::parse(read_text_file(path));
}

}  // namespace ampcon
