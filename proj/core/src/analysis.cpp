#include "bbcpl/analysis.hpp"

#include "bbcpl/controllers.hpp"
#include "bbcpl/energy.hpp"
#include "bbcpl/errors.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <string>
#include <unordered_map>

namespace bbcpl {

namespace {

void require_positive(double v, const char* who)
{
    if (!(v > 0.0)) {
        throw DomainError(std::string(who) + ": argument must be positive");
    }
}

double central_difference(const std::function<double(double)>& f, double x)
{
    const double h = 1e-6 * std::max(1.0, std::abs(x));
    return (f(x + h) - f(x - h)) / (2.0 * h);
}

} // namespace

double zd_current_fixed(double x2, const Equilibrium& eq, double D)
{
    require_positive(x2, "zd_current_fixed");
    return D * (x2 - eq.x2_star) / (eq.x2_star * x2 * (x2 + 1.0));
}

double zd_current_fixed_input(double x2) { return x2 / (x2 + 1.0); }

double zd_voltage_fixed(double x1, const Equilibrium& eq, double /*D*/)
{
    require_positive(x1, "zd_voltage_fixed");
    return 1.0 - eq.x1_star / x1;
}

double zd_voltage_fixed_printed(double x1, const Equilibrium& eq, double D)
{
    require_positive(x1, "zd_voltage_fixed_printed");
    return 1.0 - (eq.x1_star - D) / x1;
}

double zd_voltage_fixed_input(double x1, const Equilibrium& eq, double D)
{
    require_positive(x1, "zd_voltage_fixed_input");
    return 1.0 - D / (x1 * eq.x2_star);
}

ZeroDynamicsReport zero_dynamics_report(const Equilibrium& eq, double D)
{
    ZeroDynamicsReport r;
    const double x1s = eq.x1_star;
    const double x2s = eq.x2_star;
    r.current_slope_analytic = D / (x2s * x2s * (1.0 + x2s));
    r.current_slope_fd = central_difference([&](double y) { return zd_current_fixed(y, eq, D); }, x2s);
    r.voltage_slope_derived = 1.0 / x1s;
    // Differentiate the model itself along x2 = x2* under the holding input.
    r.voltage_slope_fd = central_difference(
        [&](double y) {
            const State x{y, x2s};
            const double u = zd_voltage_fixed_input(y, eq, D);
            return drift(x, D).v1 + input_vector(x).v1 * u;
        },
        x1s);
    r.voltage_slope_printed = (x1s - D) / (x1s * x1s);
    r.printed_value_at_equilibrium = zd_voltage_fixed_printed(x1s, eq, D);

    r.printed_form_matches = true;
    for (const double scale : {0.5, 1.0, 2.0}) {
        const double y = scale * x1s;
        if (std::abs(zd_voltage_fixed_printed(y, eq, D) - zd_voltage_fixed(y, eq, D)) > 1e-12) {
            r.printed_form_matches = false;
        }
    }
    if (!r.printed_form_matches) {
        r.note = "printed w(x1) = 1 - (x1* - D)/x1 does not follow from the model; substituting "
                 "u = 1 - D/(x1 x2*) gives w(x1) = 1 - x1*/x1 (w(x1*) = 0, slope 1/x1*). "
                 "Both slopes are positive, so the instability conclusion is unaffected.";
    }
    return r;
}

SearchBox default_saddle_box(const Equilibrium& eq)
{
    return {0.01 * eq.x1_star, 5.0 * eq.x1_star + 1.0, 0.01 * eq.x2_star, 3.0 * eq.x2_star};
}

Matrix2 fd_jacobian(const PlanarField& field, State x, double h)
{
    const double h1 = h * std::max(1.0, std::abs(x.x1));
    const double h2 = h * std::max(1.0, std::abs(x.x2));
    const Vec2 d1 = (1.0 / (2.0 * h1)) * (field({x.x1 + h1, x.x2}) - field({x.x1 - h1, x.x2}));
    const Vec2 d2 = (1.0 / (2.0 * h2)) * (field({x.x1, x.x2 + h2}) - field({x.x1, x.x2 - h2}));
    return {d1.v1, d2.v1, d1.v2, d2.v2};
}

namespace {

constexpr double kNewtonTolerance = 1e-12;

std::optional<State> damped_newton(const PlanarField& field, State x)
{
    Vec2 fx = field(x);
    for (int it = 0; it < 100; ++it) {
        if (fx.norm() <= kNewtonTolerance) {
            return x;
        }
        const Matrix2 j = fd_jacobian(field, x, 1e-7);
        const double det = j.det();
        if (det == 0.0 || !std::isfinite(det)) {
            return std::nullopt;
        }
        const Vec2 step = (-1.0 / det) * (j.adjugate() * fx);
        bool accepted = false;
        for (double t = 1.0; t > 1e-8; t *= 0.5) {
            const State trial{x.x1 + t * step.v1, x.x2 + t * step.v2};
            if (!trial.in_open_quadrant()) {
                continue;
            }
            const Vec2 ft = field(trial);
            if (std::isfinite(ft.norm()) && ft.norm() < fx.norm()) {
                x = trial;
                fx = ft;
                accepted = true;
                break;
            }
        }
        if (!accepted) {
            break;
        }
    }
    return fx.norm() <= kNewtonTolerance ? std::optional<State>(x) : std::nullopt;
}

} // namespace

Saddle find_saddle(const Equilibrium& eq, double D, double k1, double k2, const SearchBox& box, int scan_resolution)
{
    const PlanarField field = [&](State x) { return ida_target_field(x, D, k1, k2); };
    const int n = std::max(scan_resolution, 2);
    std::vector<Vec2> nodes(static_cast<std::size_t>(n + 1) * (n + 1));
    auto px = [&](int i) { return box.x1_min + (box.x1_max - box.x1_min) * i / n; };
    auto py = [&](int j) { return box.x2_min + (box.x2_max - box.x2_min) * j / n; };
    for (int j = 0; j <= n; ++j) {
        for (int i = 0; i <= n; ++i) {
            nodes[static_cast<std::size_t>(j) * (n + 1) + i] = field({px(i), py(j)});
        }
    }
    auto node = [&](int i, int j) { return nodes[static_cast<std::size_t>(j) * (n + 1) + i]; };

    std::vector<Saddle> found;
    const State xs = eq.state();
    for (int j = 0; j < n; ++j) {
        for (int i = 0; i < n; ++i) {
            const Vec2 c[4] = {node(i, j), node(i + 1, j), node(i, j + 1), node(i + 1, j + 1)};
            auto mixed = [&](auto comp) {
                bool neg = false;
                bool pos = false;
                for (const Vec2& v : c) {
                    (comp(v) < 0.0 ? neg : pos) = true;
                }
                return neg && pos;
            };
            if (!mixed([](Vec2 v) { return v.v1; }) || !mixed([](Vec2 v) { return v.v2; })) {
                continue;
            }
            const auto root = damped_newton(field, {0.5 * (px(i) + px(i + 1)), 0.5 * (py(j) + py(j + 1))});
            if (!root) {
                continue;
            }
            if (std::hypot(root->x1 - xs.x1, root->x2 - xs.x2) <= 1e-3) {
                continue;
            }
            const bool duplicate = std::any_of(found.begin(), found.end(), [&](const Saddle& s) {
                return std::hypot(s.state.x1 - root->x1, s.state.x2 - root->x2) < 1e-6;
            });
            if (duplicate) {
                continue;
            }
            const auto ev = fd_jacobian(field, *root).eigenvalues();
            if (!(ev[0].real() < 0.0 && ev[1].real() > 0.0)) {
                continue;
            }
            found.push_back({*root, field(*root).norm(), ev, hamiltonian(*root, D, k1, k2)});
        }
    }
    if (found.empty()) {
        throw NotFoundError("find_saddle: no saddle of the closed loop in the search box");
    }
    return *std::min_element(found.begin(), found.end(),
                             [](const Saddle& a, const Saddle& b) { return a.energy < b.energy; });
}

const char* to_string(LimitingConstraint c)
{
    switch (c) {
    case LimitingConstraint::saddle_level:
        return "saddle_level";
    case LimitingConstraint::orthant_boundary:
        return "orthant_boundary";
    }
    return "unknown";
}

LevelGrid sample_energy_grid(const SearchBox& box, int resolution, double D, double k1, double k2)
{
    LevelGrid grid;
    grid.box = box;
    grid.n1 = std::max(resolution, 2);
    grid.n2 = grid.n1;
    grid.values.resize(static_cast<std::size_t>(grid.n1) * grid.n2);
    for (int j = 0; j < grid.n2; ++j) {
        for (int i = 0; i < grid.n1; ++i) {
            grid.values[static_cast<std::size_t>(j) * grid.n1 + i] = hamiltonian({grid.x1_at(i), grid.x2_at(j)}, D, k1, k2);
        }
    }
    return grid;
}

namespace {

struct EdgeContact {
    bool lower{false}; ///< reached the x1_min or x2_min edge
    bool upper{false}; ///< reached the x1_max or x2_max edge
    [[nodiscard]] bool any() const { return lower || upper; }
};

EdgeContact flood_contact(const LevelGrid& grid, double level, State seed)
{
    auto clampi = [](long v, int n) { return static_cast<int>(std::clamp<long>(v, 0, n - 1)); };
    const double d1 = (grid.box.x1_max - grid.box.x1_min) / (grid.n1 - 1);
    const double d2 = (grid.box.x2_max - grid.box.x2_min) / (grid.n2 - 1);
    const int si = clampi(std::lround((seed.x1 - grid.box.x1_min) / d1), grid.n1);
    const int sj = clampi(std::lround((seed.x2 - grid.box.x2_min) / d2), grid.n2);

    EdgeContact contact;
    auto inside = [&](int i, int j) { return grid.at(i, j) <= level; };
    if (!inside(si, sj)) {
        return contact;
    }
    std::vector<std::uint8_t> seen(grid.values.size(), 0);
    std::vector<std::pair<int, int>> stack{{si, sj}};
    seen[static_cast<std::size_t>(sj) * grid.n1 + si] = 1;
    while (!stack.empty()) {
        const auto [i, j] = stack.back();
        stack.pop_back();
        if (i == 0 || j == 0) {
            contact.lower = true;
        }
        if (i == grid.n1 - 1 || j == grid.n2 - 1) {
            contact.upper = true;
        }
        for (int dj = -1; dj <= 1; ++dj) {
            for (int di = -1; di <= 1; ++di) {
                const int ni = i + di;
                const int nj = j + dj;
                if (ni < 0 || nj < 0 || ni >= grid.n1 || nj >= grid.n2) {
                    continue;
                }
                auto& mark = seen[static_cast<std::size_t>(nj) * grid.n1 + ni];
                if (mark == 0 && inside(ni, nj)) {
                    mark = 1;
                    stack.emplace_back(ni, nj);
                }
            }
        }
    }
    return contact;
}

SearchBox box_around(const Equilibrium& eq, double half_width)
{
    const double floor = 1e-6 * half_width;
    return {std::max(floor, eq.x1_star - half_width), eq.x1_star + half_width,
            std::max(floor, eq.x2_star - half_width), eq.x2_star + half_width};
}

} // namespace

bool component_is_interior(const LevelGrid& grid, double level, State seed)
{
    return !flood_contact(grid, level, seed).any();
}

SublevelEstimate estimate_domain(const Equilibrium& eq, double D, double k1, double k2, const DomainOptions& options)
{
    SublevelEstimate est;
    const State xs = eq.state();
    est.energy_at_equilibrium = hamiltonian(xs, D, k1, k2);
    est.grid_resolution = std::max(options.grid_resolution, 8);
    try {
        est.saddle = find_saddle(eq, D, k1, k2, default_saddle_box(eq), options.saddle_scan_resolution);
    } catch (const NotFoundError&) {
        est.warnings.emplace_back("no saddle found; only the orthant constraint is used");
    }

    double half_width = 0.0;
    if (options.box) {
        est.box = *options.box;
    } else {
        const double dist = est.saddle ? std::hypot(est.saddle->state.x1 - xs.x1, est.saddle->state.x2 - xs.x2)
                                       : std::max(xs.x1, xs.x2);
        half_width = 3.0 * dist;
        est.box = box_around(eq, half_width);
    }

    const double h_star = est.energy_at_equilibrium;
    for (int attempt = 0; attempt < 5; ++attempt) {
        const LevelGrid grid = sample_energy_grid(est.box, est.grid_resolution, D, k1, k2);
        auto contact = [&](double c) { return flood_contact(grid, c, xs); };

        double c_hi = 0.0;
        if (est.saddle) {
            c_hi = est.saddle->energy;
        } else {
            double span = std::max(1.0, std::abs(h_star));
            int grow = 0;
            while (!contact(h_star + span).any() && grow++ < 60) {
                span *= 2.0;
            }
            c_hi = h_star + span;
        }
        const double step = (c_hi - h_star) / est.grid_resolution;

        double lo = h_star;
        EdgeContact binding;
        if (est.saddle && !contact(c_hi - step).any()) {
            lo = c_hi - step;
            est.limiting_constraint = LimitingConstraint::saddle_level;
        } else {
            double hi = c_hi - (est.saddle ? step : 0.0);
            binding = contact(hi);
            while (hi - lo > step) {
                const double mid = 0.5 * (lo + hi);
                const EdgeContact at_mid = contact(mid);
                if (at_mid.any()) {
                    hi = mid;
                    binding = at_mid;
                } else {
                    lo = mid;
                }
            }
            est.limiting_constraint = LimitingConstraint::orthant_boundary;
        }

        if (binding.upper && !binding.lower && !options.box) {
            // The component ran into the artificial outer edge: widen and retry.
            half_width *= 2.0;
            est.box = box_around(eq, half_width);
            continue;
        }
        if (binding.upper && !binding.lower) {
            est.warnings.emplace_back("sublevel component limited by the outer edge of the search box");
        }
        est.c_star = std::max(h_star, lo - step);
        return est;
    }
    est.warnings.emplace_back("search box could not be widened enough; estimate is box-limited");
    est.c_star = h_star;
    return est;
}

std::vector<Polyline> extract_contours(const LevelGrid& grid, double level)
{
    const int n1 = grid.n1;
    const int n2 = grid.n2;
    const std::int64_t vertical_offset = static_cast<std::int64_t>(n1 - 1) * n2;
    auto h_edge = [&](int i, int j) { return static_cast<std::int64_t>(j) * (n1 - 1) + i; };
    auto v_edge = [&](int i, int j) { return vertical_offset + static_cast<std::int64_t>(j) * n1 + i; };
    auto in = [&](int i, int j) { return grid.at(i, j) <= level; };

    std::unordered_map<std::int64_t, State> points;
    std::unordered_map<std::int64_t, std::vector<std::int64_t>> links;

    auto crossing = [&](int ia, int ja, int ib, int jb) {
        const double va = grid.at(ia, ja);
        const double vb = grid.at(ib, jb);
        double t = (level - va) / (vb - va);
        if (!std::isfinite(t)) {
            t = 0.5;
        }
        t = std::clamp(t, 0.0, 1.0);
        return State{grid.x1_at(ia) + t * (grid.x1_at(ib) - grid.x1_at(ia)),
                     grid.x2_at(ja) + t * (grid.x2_at(jb) - grid.x2_at(ja))};
    };
    auto link = [&](std::int64_t a, std::int64_t b) {
        links[a].push_back(b);
        links[b].push_back(a);
    };

    for (int j = 0; j + 1 < n2; ++j) {
        for (int i = 0; i + 1 < n1; ++i) {
            const bool bl = in(i, j);
            const bool br = in(i + 1, j);
            const bool tl = in(i, j + 1);
            const bool tr = in(i + 1, j + 1);
            // Edges in order bottom, right, top, left.
            const std::int64_t ids[4] = {h_edge(i, j), v_edge(i + 1, j), h_edge(i, j + 1), v_edge(i, j)};
            const bool cut[4] = {bl != br, br != tr, tl != tr, bl != tl};
            if (cut[0]) points.emplace(ids[0], crossing(i, j, i + 1, j));
            if (cut[1]) points.emplace(ids[1], crossing(i + 1, j, i + 1, j + 1));
            if (cut[2]) points.emplace(ids[2], crossing(i, j + 1, i + 1, j + 1));
            if (cut[3]) points.emplace(ids[3], crossing(i, j, i, j + 1));

            const int count = cut[0] + cut[1] + cut[2] + cut[3];
            if (count == 2) {
                std::int64_t e[2];
                int k = 0;
                for (int q = 0; q < 4; ++q) {
                    if (cut[q]) e[k++] = ids[q];
                }
                link(e[0], e[1]);
            } else if (count == 4) {
                const double centre = 0.25 * (grid.at(i, j) + grid.at(i + 1, j) + grid.at(i, j + 1) + grid.at(i + 1, j + 1));
                const bool centre_in = centre <= level;
                // Keep the centre connected to the corners that share its side.
                if (centre_in == bl) {
                    link(ids[0], ids[1]); // isolates br
                    link(ids[2], ids[3]); // isolates tl
                } else {
                    link(ids[3], ids[0]); // isolates bl
                    link(ids[1], ids[2]); // isolates tr
                }
            }
        }
    }

    std::vector<Polyline> lines;
    std::unordered_map<std::int64_t, bool> used;
    auto walk = [&](std::int64_t start) {
        Polyline line;
        std::int64_t prev = -1;
        std::int64_t cur = start;
        while (true) {
            used[cur] = true;
            line.vertices.push_back(points.at(cur));
            std::int64_t next = -1;
            for (const std::int64_t cand : links[cur]) {
                if (cand != prev && !used[cand]) {
                    next = cand;
                    break;
                }
            }
            if (next < 0) {
                const auto& nb = links[cur];
                line.closed = line.vertices.size() > 2 && std::find(nb.begin(), nb.end(), start) != nb.end();
                break;
            }
            prev = cur;
            cur = next;
        }
        if (line.closed) {
            line.vertices.push_back(line.vertices.front());
        }
        return line;
    };
    // Open chains start at their endpoints, then whatever remains are loops.
    std::vector<std::int64_t> keys;
    keys.reserve(links.size());
    for (const auto& [id, nb] : links) {
        keys.push_back(id);
    }
    std::sort(keys.begin(), keys.end());
    for (const std::int64_t id : keys) {
        if (!used[id] && links[id].size() == 1) {
            lines.push_back(walk(id));
        }
    }
    for (const std::int64_t id : keys) {
        if (!used[id]) {
            lines.push_back(walk(id));
        }
    }
    return lines;
}

bool polygon_contains(const Polyline& polygon, State x)
{
    bool inside = false;
    const auto& v = polygon.vertices;
    for (std::size_t a = 0, b = v.size() - 1; a < v.size(); b = a++) {
        if ((v[a].x2 > x.x2) != (v[b].x2 > x.x2)) {
            const double cross = v[a].x1 + (x.x2 - v[a].x2) * (v[b].x1 - v[a].x1) / (v[b].x2 - v[a].x2);
            if (x.x1 < cross) {
                inside = !inside;
            }
        }
    }
    return inside;
}

namespace {

double polygon_area(const Polyline& p)
{
    double twice = 0.0;
    for (std::size_t a = 0, b = p.vertices.size() - 1; a < p.vertices.size(); b = a++) {
        twice += p.vertices[b].x1 * p.vertices[a].x2 - p.vertices[a].x1 * p.vertices[b].x2;
    }
    return 0.5 * std::abs(twice);
}

} // namespace

std::optional<Polyline> enclosing_contour(const LevelGrid& grid, double level, State inside)
{
    std::optional<Polyline> best;
    double best_area = std::numeric_limits<double>::infinity();
    for (auto& line : extract_contours(grid, level)) {
        if (!line.closed || !polygon_contains(line, inside)) {
            continue;
        }
        const double area = polygon_area(line);
        if (area < best_area) {
            best_area = area;
            best = std::move(line);
        }
    }
    return best;
}

} // namespace bbcpl
