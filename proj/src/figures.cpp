#include "vspike/figures.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <map>
#include <sstream>

namespace vspike {

namespace {

struct Pt {
    double x, y;
};

int64_t qkey(double a) { return static_cast<int64_t>(std::llround(a * 1e7)); }

struct Seg {
    Pt a, b;
    bool used = false;
};

Pt lerp(Pt p, Pt q, double vp, double vq, double level) {
    double t = (level - vp) / (vq - vp);
    return {p.x + t * (q.x - p.x), p.y + t * (q.y - p.y)};
}

} // namespace

std::vector<Polyline> extract_contours(const Field2D& mesh_x, const Field2D& mesh_y,
                                       const Field2D& values, double level) {
    const StripGrid& g = *values.grid;
    std::vector<Seg> segs;
    for (int i = 0; i + 1 < g.Ny; ++i) {
        for (int j = 0; j + 1 < g.Nx; ++j) {
            Pt p00{mesh_x.at(i, j), mesh_y.at(i, j)};
            Pt p10{mesh_x.at(i, j + 1), mesh_y.at(i, j + 1)};
            Pt p01{mesh_x.at(i + 1, j), mesh_y.at(i + 1, j)};
            Pt p11{mesh_x.at(i + 1, j + 1), mesh_y.at(i + 1, j + 1)};
            double v00 = values.at(i, j), v10 = values.at(i, j + 1);
            double v01 = values.at(i + 1, j), v11 = values.at(i + 1, j + 1);
            int c = (v00 > level) | ((v10 > level) << 1) | ((v11 > level) << 2) | ((v01 > level) << 3);
            if (c == 0 || c == 15) continue;
            Pt eb, et, el, er;
            bool hb = (v00 > level) != (v10 > level);
            bool ht = (v01 > level) != (v11 > level);
            bool hl = (v00 > level) != (v01 > level);
            bool hr = (v10 > level) != (v11 > level);
            if (hb) eb = lerp(p00, p10, v00, v10, level);
            if (ht) et = lerp(p01, p11, v01, v11, level);
            if (hl) el = lerp(p00, p01, v00, v01, level);
            if (hr) er = lerp(p10, p11, v10, v11, level);
            // saddle split by cell mean
            if (c == 5 || c == 10) {
                double mean = 0.25 * (v00 + v10 + v01 + v11);
                bool flip = mean > level;
                if ((c == 5) == flip) {
                    segs.push_back({el, eb});
                    segs.push_back({et, er});
                } else {
                    segs.push_back({el, et});
                    segs.push_back({eb, er});
                }
                continue;
            }
            std::vector<Pt> pts;
            if (hb) pts.push_back(eb);
            if (hr) pts.push_back(er);
            if (ht) pts.push_back(et);
            if (hl) pts.push_back(el);
            if (pts.size() == 2) segs.push_back({pts[0], pts[1]});
        }
    }

    std::multimap<std::pair<int64_t, int64_t>, size_t> ends;
    for (size_t s = 0; s < segs.size(); ++s) {
        ends.insert({{qkey(segs[s].a.x), qkey(segs[s].a.y)}, s});
        ends.insert({{qkey(segs[s].b.x), qkey(segs[s].b.y)}, s});
    }
    auto next_seg = [&](Pt p, size_t exclude) -> long {
        auto range = ends.equal_range({qkey(p.x), qkey(p.y)});
        for (auto it = range.first; it != range.second; ++it)
            if (it->second != exclude && !segs[it->second].used) return static_cast<long>(it->second);
        return -1;
    };

    std::vector<Polyline> out;
    for (size_t s0 = 0; s0 < segs.size(); ++s0) {
        if (segs[s0].used) continue;
        segs[s0].used = true;
        std::vector<Pt> chain{segs[s0].a, segs[s0].b};
        // extend forward
        for (;;) {
            long nx = next_seg(chain.back(), SIZE_MAX);
            if (nx < 0) break;
            Seg& s = segs[nx];
            s.used = true;
            Pt tail = chain.back();
            bool near_a = qkey(s.a.x) == qkey(tail.x) && qkey(s.a.y) == qkey(tail.y);
            chain.push_back(near_a ? s.b : s.a);
        }
        // extend backward
        for (;;) {
            long nx = next_seg(chain.front(), SIZE_MAX);
            if (nx < 0) break;
            Seg& s = segs[nx];
            s.used = true;
            Pt head = chain.front();
            bool near_a = qkey(s.a.x) == qkey(head.x) && qkey(s.a.y) == qkey(head.y);
            chain.insert(chain.begin(), near_a ? s.b : s.a);
        }
        Polyline p;
        for (auto& pt : chain) {
            p.x.push_back(pt.x);
            p.y.push_back(pt.y);
        }
        p.closed = chain.size() > 3 && qkey(chain.front().x) == qkey(chain.back().x) &&
                   qkey(chain.front().y) == qkey(chain.back().y);
        out.push_back(std::move(p));
    }
    return out;
}

namespace {

struct Box {
    double x0 = 1e300, x1 = -1e300, y0 = 1e300, y1 = -1e300;
    void add(double x, double y) {
        x0 = std::min(x0, x);
        x1 = std::max(x1, x);
        y0 = std::min(y0, y);
        y1 = std::max(y1, y);
    }
};

class SvgCanvas {
public:
    SvgCanvas(Box box, int w = 900, int h = 600) : box_(box), w_(w), h_(h) {
        os_ << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << w_ << "\" height=\"" << h_
            << "\" viewBox=\"0 0 " << w_ << " " << h_ << "\">\n";
        os_ << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
    }
    double px(double x) const { return 40 + (x - box_.x0) / (box_.x1 - box_.x0) * (w_ - 80); }
    double py(double y) const { return h_ - 40 - (y - box_.y0) / (box_.y1 - box_.y0) * (h_ - 80); }
    void polyline(const std::vector<double>& x, const std::vector<double>& y,
                  const std::string& style) {
        os_ << "<polyline fill=\"none\" " << style << " points=\"";
        for (size_t i = 0; i < x.size(); ++i) os_ << px(x[i]) << ',' << py(y[i]) << ' ';
        os_ << "\"/>\n";
    }
    void rect(double x0, double y0, double x1, double y1, const std::string& fill) {
        double a = px(x0), b = py(y1), wd = px(x1) - px(x0), ht = py(y0) - py(y1);
        os_ << "<rect x=\"" << a << "\" y=\"" << b << "\" width=\"" << wd << "\" height=\"" << ht
            << "\" fill=\"" << fill << "\"/>\n";
    }
    void text(double xpix, double ypix, const std::string& s) {
        os_ << "<text x=\"" << xpix << "\" y=\"" << ypix << "\" font-size=\"14\" font-family=\"sans-serif\">"
            << s << "</text>\n";
    }
    std::string finish() {
        os_ << "</svg>\n";
        return os_.str();
    }

private:
    Box box_;
    int w_, h_;
    std::ostringstream os_;
};

std::string diverging_color(double t) {
    // t in [-1, 1]: blue -> white -> red
    t = std::clamp(t, -1.0, 1.0);
    int r, g, b;
    if (t < 0) {
        r = static_cast<int>(255 * (1 + t));
        g = static_cast<int>(255 * (1 + t));
        b = 255;
    } else {
        r = 255;
        g = static_cast<int>(255 * (1 - t));
        b = static_cast<int>(255 * (1 - t));
    }
    std::ostringstream os;
    os << "rgb(" << r << ',' << g << ',' << b << ")";
    return os.str();
}

} // namespace

std::string svg_streamlines(const Field2D& mesh_x, const Field2D& mesh_y, const Field2D& psi,
                            const Field2D& omega, const std::vector<double>& surf_x,
                            const std::vector<double>& surf_y) {
    const StripGrid& g = *psi.grid;
    Box box;
    for (int i = 0; i < g.Ny; ++i)
        for (int j = 0; j < g.Nx; ++j) box.add(mesh_x.at(i, j), mesh_y.at(i, j));
    for (size_t j = 0; j < surf_x.size(); ++j) box.add(surf_x[j], surf_y[j] + 0.05);
    SvgCanvas c(box);

    double pmin = 1e300, pmax = -1e300;
    for (double v : psi.v) {
        pmin = std::min(pmin, v);
        pmax = std::max(pmax, v);
    }
    for (int lev = 1; lev <= 12; ++lev) {
        double level = pmin + (pmax - pmin) * lev / 13.0;
        auto lines = extract_contours(mesh_x, mesh_y, psi, level);
        for (auto& p : lines) {
            // color by the vorticity sign in the region the streamline encloses
            std::string style = level > 0.5 * pmax
                                    ? "stroke=\"#b22222\" stroke-width=\"1.2\""
                                    : "stroke=\"#1f4e8c\" stroke-width=\"1\"";
            (void)omega;
            c.polyline(p.x, p.y, style);
        }
    }
    c.polyline(surf_x, surf_y, "stroke=\"black\" stroke-width=\"2\"");
    std::vector<double> bx = {box.x0, box.x1}, by = {-1.0, -1.0};
    c.polyline(bx, by, "stroke=\"black\" stroke-width=\"2\"");
    c.text(50, 25, "stream function contours (surface exaggeration none)");
    return c.finish();
}

std::string svg_heatmap(const Field2D& mesh_x, const Field2D& mesh_y, const Field2D& values,
                        const std::string& title) {
    const StripGrid& g = *values.grid;
    Box box;
    for (int i = 0; i < g.Ny; ++i)
        for (int j = 0; j < g.Nx; ++j) box.add(mesh_x.at(i, j), mesh_y.at(i, j));
    SvgCanvas c(box);
    double m = 0.0;
    for (double v : values.v) m = std::max(m, std::abs(v));
    int si = std::max(1, g.Ny / 120), sj = std::max(1, g.Nx / 160);
    for (int i = 0; i + si < g.Ny; i += si)
        for (int j = 0; j + sj < g.Nx; j += sj) {
            double v = values.at(i, j);
            c.rect(mesh_x.at(i, j), mesh_y.at(i, j), mesh_x.at(i, j + sj), mesh_y.at(i + si, j),
                   diverging_color(m > 0 ? v / m : 0.0));
        }
    c.text(50, 25, title);
    return c.finish();
}

std::string svg_line_plot(const std::vector<double>& x, const std::vector<double>& y,
                          const std::vector<double>& y_overlay, const std::string& title) {
    Box box;
    for (size_t i = 0; i < x.size(); ++i) {
        box.add(x[i], y[i]);
        if (!y_overlay.empty()) box.add(x[i], y_overlay[i]);
    }
    if (box.y1 - box.y0 < 1e-300) box.y1 = box.y0 + 1.0;
    SvgCanvas c(box);
    std::vector<double> zx = {box.x0, box.x1}, zy = {0.0, 0.0};
    if (box.y0 < 0 && box.y1 > 0) c.polyline(zx, zy, "stroke=\"#cccccc\" stroke-width=\"1\"");
    c.polyline(x, y, "stroke=\"#1f4e8c\" stroke-width=\"1.5\"");
    if (!y_overlay.empty())
        c.polyline(x, y_overlay, "stroke=\"#b22222\" stroke-width=\"1.2\" stroke-dasharray=\"6 4\"");
    std::ostringstream t;
    t.precision(3);
    t << title << "  [min " << box.y0 << ", max " << box.y1 << "]";
    c.text(50, 25, t.str());
    return c.finish();
}

} // namespace vspike
