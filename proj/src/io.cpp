#include "ptbox/io.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>
#include <stdexcept>

namespace ptbox::io {

namespace {

void escape(std::string& out, const std::string& s) {
    out += '"';
    for (unsigned char c : s) {
        switch (c) {
            case '"': out += "\\\""; break;
            case '\\': out += "\\\\"; break;
            case '\n': out += "\\n"; break;
            case '\r': out += "\\r"; break;
            case '\t': out += "\\t"; break;
            default:
                if (c < 0x20) {
                    char buf[8];
                    std::snprintf(buf, sizeof buf, "\\u%04x", c);
                    out += buf;
                } else {
                    out += static_cast<char>(c);
                }
        }
    }
    out += '"';
}

void emit(std::string& out, const json& j, int indent, int depth) {
    auto newline = [&](int d) {
        if (indent < 0) return;
        out += '\n';
        out.append(static_cast<std::size_t>(indent * d), ' ');
    };
    switch (j.type()) {
        case json::value_t::object: {
            if (j.empty()) {
                out += "{}";
                return;
            }
            out += '{';
            bool first = true;
            for (auto it = j.begin(); it != j.end(); ++it) {
                if (!first) out += ',';
                first = false;
                newline(depth + 1);
                escape(out, it.key());
                out += indent < 0 ? ":" : ": ";
                emit(out, it.value(), indent, depth + 1);
            }
            newline(depth);
            out += '}';
            return;
        }
        case json::value_t::array: {
            if (j.empty()) {
                out += "[]";
                return;
            }
            out += '[';
            bool first = true;
            for (const auto& v : j) {
                if (!first) out += ',';
                first = false;
                newline(depth + 1);
                emit(out, v, indent, depth + 1);
            }
            newline(depth);
            out += ']';
            return;
        }
        case json::value_t::number_float: {
            const double v = j.get<double>();
            out += std::isfinite(v) ? format_number(v) : "null";
            return;
        }
        case json::value_t::string:
            escape(out, j.get<std::string>());
            return;
        default:
            out += j.dump();
    }
}

void complex_pair(const char* re, const char* im, cd v, json& into) {
    into[re] = v.real();
    into[im] = v.imag();
}

std::string csv(double v) { return format_number(v); }

}  // namespace

std::string format_number(double v) {
    if (std::isnan(v)) return "nan";
    if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

std::string dump(const json& j, int indent) {
    std::string out;
    emit(out, j, indent, 0);
    out += '\n';
    return out;
}

json to_json(const Spectrum& spectrum) {
    auto mode_json = [](const Mode& m) {
        json j;
        j["n"] = m.n;
        complex_pair("k_re", "k_im", m.k, j);
        complex_pair("E_re", "E_im", m.energy, j);
        complex_pair("A_re", "A_im", m.coeff_a, j);
        complex_pair("B_re", "B_im", m.coeff_b, j);
        j["N"] = std::abs(m.norm);
        if (m.pt_eigenvalue) j["pt_eigenvalue"] = *m.pt_eigenvalue;
        return j;
    };
    json out;
    out["config"] = {{"L", spectrum.config.length},
                     {"ell1", spectrum.config.boundary.ell1},
                     {"ell2", spectrum.config.boundary.ell2}};
    out["modes"] = json::array();
    for (const auto& m : spectrum.modes) out["modes"].push_back(mode_json(m));
    out["unidirectional_modes"] = json::array();
    for (const auto& m : spectrum.unidirectional) out["unidirectional_modes"].push_back(mode_json(m));
    out["broken"] = spectrum.broken;
    out["normalized"] = spectrum.normalized;
    return out;
}

json to_json(const em::ResonanceFit& fit) {
    json j;
    j["k_c"] = fit.k_c;
    j["Q"] = fit.Q;
    j["Z"] = fit.Z;
    j["Delta"] = fit.Delta;
    j["Q2"] = fit.Q2;
    j["parity"] = fit.parity ? json(std::string(em::to_string(*fit.parity))) : json(nullptr);
    j["residual"] = fit.residual;
    j["rho"] = fit.rho;
    j["zero_left"] = fit.zero_left;
    j["zero_right"] = fit.zero_right;
    return j;
}

json to_json(const std::vector<variational::ExtremizationReport>& reports) {
    json out = json::array();
    for (const auto& rep : reports) {
        json r;
        r["constraint_class"] = rep.results.empty() ? json(nullptr) : json(rep.results.front().constraint_class);
        r["starts"] = rep.starts;
        r["failed_starts"] = rep.failed_starts;
        r["stationary_points"] = json::array();
        for (const auto& s : rep.results)
            r["stationary_points"].push_back({{"lambda", s.lambda}, {"residual", s.residual}, {"pt_norm", s.pt_norm}});
        out.push_back(r);
    }
    return out;
}

void write_gram_csv(std::ostream& os, const Eigen::MatrixXcd& gram) {
    os << "n,m,re,im\n";
    for (Eigen::Index n = 0; n < gram.rows(); ++n)
        for (Eigen::Index m = 0; m < gram.cols(); ++m)
            os << n + 1 << ',' << m + 1 << ',' << csv(gram(n, m).real()) << ',' << csv(gram(n, m).imag()) << '\n';
}

void write_sweep_csv(std::ostream& os, const std::vector<em::SweepRow>& rows) {
    os << "k,t2,rL2,rR2,aL2,aR2,pole_flag\n";
    for (const auto& r : rows)
        os << csv(r.k) << ',' << csv(r.t2) << ',' << csv(r.rl2) << ',' << csv(r.rr2) << ',' << csv(r.al2) << ','
           << csv(r.ar2) << ',' << (r.pole ? 1 : 0) << '\n';
}

void write_kernel_csv(std::ostream& os, const std::vector<kernel::KernelEvaluation>& rows) {
    os << "x,x',re,im\n";
    for (const auto& r : rows)
        os << csv(r.x) << ',' << csv(r.xp) << ',' << csv(r.value.real()) << ',' << csv(r.value.imag()) << '\n';
}

void write_profile_csv(std::ostream& os, const std::vector<Mode>& modes, const std::vector<double>& grid) {
    os << 'x';
    for (const auto& m : modes) os << ",re_psi_" << m.n << ",im_psi_" << m.n;
    os << '\n';
    for (double x : grid) {
        os << csv(x);
        for (const auto& m : modes) {
            const cd v = eigenfunction_eval(m, x);
            os << ',' << csv(v.real()) << ',' << csv(v.imag());
        }
        os << '\n';
    }
}

void write_file(const std::string& path, const std::string& text) {
    std::ofstream f(path, std::ios::binary | std::ios::trunc);
    if (!f) throw std::runtime_error("cannot open '" + path + "' for writing");
    f << text;
    if (!f) throw std::runtime_error("write to '" + path + "' failed");
}

}  // namespace ptbox::io
