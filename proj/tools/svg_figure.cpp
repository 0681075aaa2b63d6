#include "svg_figure.hpp"

#include <cmath>
#include <fstream>
#include <sstream>

#include "nonbayes/errors.hpp"

namespace nonbayes::fig {

namespace {

constexpr double kW = 640.0;
constexpr double kH = 560.0;
constexpr double kMargin = 60.0;

struct Pt {
    double x = 0.0;
    double y = 0.0;
};

/// Barycentric map: two states on a horizontal segment, three states on the
/// equilateral triangle with vertices (0,0), (1,0), (1/2, sqrt(3)/2).
Pt planar(const Vec& b) {
    if (b.size() == 2) return {b[0], 0.0};
    return {b[1] + 0.5 * b[2], std::sqrt(3.0) / 2.0 * b[2]};
}

/// Map unit coordinates to the SVG canvas (y axis flipped).
Pt canvas(const Pt& p) {
    const double span = kW - 2.0 * kMargin;
    return {kMargin + p.x * span, kH - kMargin - p.y * span};
}

std::string fmt(double v) {
    std::ostringstream out;
    out.precision(2);
    out << std::fixed << v;
    return out.str();
}

void circle(std::ostream& out, const Pt& c, double r, const std::string& fill,
            double opacity) {
    out << "  <circle cx=\"" << fmt(c.x) << "\" cy=\"" << fmt(c.y)
        << "\" r=\"" << fmt(r) << "\" fill=\"" << fill << "\" opacity=\""
        << fmt(opacity) << "\"/>\n";
}

void line(std::ostream& out, const Pt& a, const Pt& b,
          const std::string& stroke, double width, const char* dash) {
    out << "  <line x1=\"" << fmt(a.x) << "\" y1=\"" << fmt(a.y) << "\" x2=\""
        << fmt(b.x) << "\" y2=\"" << fmt(b.y) << "\" stroke=\"" << stroke
        << "\" stroke-width=\"" << fmt(width) << "\"";
    if (dash) out << " stroke-dasharray=\"" << dash << "\"";
    out << "/>\n";
}

void label(std::ostream& out, const Pt& at, const std::string& text,
           const std::string& fill = "#333") {
    out << "  <text x=\"" << fmt(at.x) << "\" y=\"" << fmt(at.y)
        << "\" font-family=\"sans-serif\" font-size=\"13\" fill=\"" << fill
        << "\">" << text << "</text>\n";
}

/// Intersection of {alpha . x = beta} with the simplex boundary, in planar
/// coordinates. Walks every vertex pair and keeps parameter values in [0,1].
std::vector<Pt> plane_trace(const Hyperplane& plane, std::size_t n) {
    std::vector<Pt> pts;
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = i + 1; j < n; ++j) {
            const double ai = plane.alpha[i];
            const double aj = plane.alpha[j];
            if (std::abs(ai - aj) < 1e-14) continue;
            const double t = (plane.beta - aj) / (ai - aj);
            if (t < -1e-9 || t > 1.0 + 1e-9) continue;
            Vec x(n, 0.0);
            x[i] = t;
            x[j] = 1.0 - t;
            pts.push_back(planar(x));
        }
    return pts;
}

} // namespace

void write_simplex_figure(const std::string& path, const Environment& env,
                          const std::vector<Snapshot>& snapshots,
                          const std::optional<Hyperplane>& plane) {
    const std::size_t n = env.states();
    if (n != 2 && n != 3)
        throw Error(Errc::InvalidParameter,
                    "simplex figures are drawable for 2 or 3 states only");

    std::ofstream out(path);
    if (!out) throw Error(Errc::ParseError, "cannot write '" + path + "'");

    out << "<svg xmlns=\"http://www.w3.org/2000/svg\" version=\"1.1\" "
           "viewBox=\"0 0 "
        << kW << " " << kH << "\">\n";
    out << "  <rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";

    // Simplex outline with vertex labels.
    if (n == 2) {
        Vec v0 = {1.0, 0.0}, v1 = {0.0, 1.0};
        const Pt a = canvas(planar(v1)); // first coordinate 0 on the left
        const Pt b = canvas(planar(v0));
        line(out, a, b, "#888", 1.5, nullptr);
        label(out, {a.x - 10.0, a.y + 24.0}, "state 2");
        label(out, {b.x - 30.0, b.y + 24.0}, "state 1");
    } else {
        Vec v0 = {1.0, 0.0, 0.0}, v1 = {0.0, 1.0, 0.0}, v2 = {0.0, 0.0, 1.0};
        const Pt a = canvas(planar(v0));
        const Pt b = canvas(planar(v1));
        const Pt c = canvas(planar(v2));
        line(out, a, b, "#888", 1.5, nullptr);
        line(out, b, c, "#888", 1.5, nullptr);
        line(out, c, a, "#888", 1.5, nullptr);
        label(out, {a.x - 48.0, a.y + 18.0}, "state 1");
        label(out, {b.x + 6.0, b.y + 18.0}, "state 2");
        label(out, {c.x - 24.0, c.y - 10.0}, "state 3");
    }

    // Bayesian posteriors (squares) and the prior (diamond).
    for (std::size_t s = 0; s < env.realizations(); ++s) {
        const Pt p = canvas(planar(bayes_posterior(env, s).coords()));
        out << "  <rect x=\"" << fmt(p.x - 5.0) << "\" y=\"" << fmt(p.y - 5.0)
            << "\" width=\"10\" height=\"10\" fill=\"#1f6fb2\"/>\n";
        label(out, {p.x + 8.0, p.y - 8.0}, "x(" + env.signals.label(s) + ")",
              "#1f6fb2");
    }
    {
        const Pt p = canvas(planar(env.prior.coords()));
        out << "  <rect x=\"" << fmt(p.x - 6.0) << "\" y=\"" << fmt(p.y - 6.0)
            << "\" width=\"12\" height=\"12\" fill=\"#222\" transform=\"rotate(45 "
            << fmt(p.x) << " " << fmt(p.y) << ")\"/>\n";
        label(out, {p.x + 10.0, p.y + 4.0}, "prior");
    }

    // Distorted posteriors, most recent snapshot most opaque.
    const std::size_t total = snapshots.size();
    for (std::size_t i = 0; i < total; ++i) {
        const double opacity =
            total <= 1 ? 0.9 : 0.25 + 0.65 * double(i) / double(total - 1);
        for (const Belief& b : snapshots[i].points)
            circle(out, canvas(planar(b.coords())), 4.5, "#c2421f", opacity);
    }
    if (!snapshots.empty() && !snapshots.back().points.empty()) {
        const Pt p =
            canvas(planar(snapshots.back().points.front().coords()));
        label(out, {p.x + 8.0, p.y + 14.0}, "distorted", "#c2421f");
    }

    // Exploit hyperplane.
    if (plane) {
        const std::vector<Pt> trace = plane_trace(*plane, n);
        if (n == 2 && !trace.empty()) {
            const Pt c = canvas(trace.front());
            line(out, {c.x, c.y - 24.0}, {c.x, c.y + 24.0}, "#7a1fa2", 2.0,
                 "6,4");
            label(out, {c.x + 6.0, c.y - 28.0}, "separator", "#7a1fa2");
        } else if (trace.size() >= 2) {
            const Pt a = canvas(trace.front());
            const Pt b = canvas(trace.back());
            line(out, a, b, "#7a1fa2", 2.0, "6,4");
            label(out, {(a.x + b.x) / 2.0 + 6.0, (a.y + b.y) / 2.0 - 6.0},
                  "separator", "#7a1fa2");
        }
    }

    out << "</svg>\n";
    if (!out)
        throw Error(Errc::ParseError, "failed while writing '" + path + "'");
}

} // namespace nonbayes::fig
