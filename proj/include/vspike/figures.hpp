#ifndef VSPIKE_FIGURES_HPP
#define VSPIKE_FIGURES_HPP

#include <string>
#include <vector>

#include "vspike/grid.hpp"

namespace vspike {

struct Polyline {
    std::vector<double> x, y;
    bool closed = false;
};

// Marching-squares level set of a scalar on a structured (possibly curvilinear)
// quad mesh; segments are chained into polylines and loop closure is detected.
std::vector<Polyline> extract_contours(const Field2D& mesh_x, const Field2D& mesh_y,
                                       const Field2D& values, double level);

// Standalone SVG emitters (no plotting dependency).
std::string svg_streamlines(const Field2D& mesh_x, const Field2D& mesh_y, const Field2D& psi,
                            const Field2D& omega, const std::vector<double>& surf_x,
                            const std::vector<double>& surf_y);
std::string svg_heatmap(const Field2D& mesh_x, const Field2D& mesh_y, const Field2D& values,
                        const std::string& title);
std::string svg_line_plot(const std::vector<double>& x, const std::vector<double>& y,
                          const std::vector<double>& y_overlay, const std::string& title);

} // namespace vspike

#endif
