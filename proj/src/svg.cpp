#include "driftflow/svg.hpp"

#include "driftflow/errors.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>

namespace driftflow {

namespace {

struct Box {
    double x0 = -1, x1 = 1, y0 = -1, y1 = 1;
};

Box data_box(const Matrix& a, const Matrix& b) {
    Box box;
    bool first = true;
    for (const Matrix* m : {&a, &b}) {
        for (long i = 0; i < m->rows(); ++i) {
            const double x = (*m)(i, 0), y = (*m)(i, 1);
            if (first) {
                box = {x, x, y, y};
                first = false;
            } else {
                box.x0 = std::min(box.x0, x);
                box.x1 = std::max(box.x1, x);
                box.y0 = std::min(box.y0, y);
                box.y1 = std::max(box.y1, y);
            }
        }
    }
    const double pad_x = std::max(0.1, 0.08 * (box.x1 - box.x0));
    const double pad_y = std::max(0.1, 0.08 * (box.y1 - box.y0));
    box.x0 -= pad_x;
    box.x1 += pad_x;
    box.y0 -= pad_y;
    box.y1 += pad_y;
    return box;
}

std::string num(double v) {
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%.2f", v);
    return buf;
}

} // namespace

void write_scatter_svg(const std::string& path, const Matrix& source,
                       const Matrix& generated, const std::string& title) {
    if ((source.size() > 0 && source.cols() != 2) ||
        (generated.size() > 0 && generated.cols() != 2))
        throw argument_error("write_scatter_svg: points must be 2-D");

    const double W = 640, H = 640, margin = 42;
    const Box box = data_box(source, generated);
    const double sx = (W - 2 * margin) / (box.x1 - box.x0);
    const double sy = (H - 2 * margin) / (box.y1 - box.y0);
    auto px = [&](double x) { return margin + (x - box.x0) * sx; };
    auto py = [&](double y) { return H - margin - (y - box.y0) * sy; };

    std::ofstream out(path, std::ios::binary);
    if (!out) throw io_error("cannot open for writing: " + path);

    out << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << W << "\" height=\""
        << H << "\" viewBox=\"0 0 " << W << " " << H << "\">\n";
    out << "<rect width=\"" << W << "\" height=\"" << H << "\" fill=\"white\"/>\n";
    out << "<rect x=\"" << margin << "\" y=\"" << margin << "\" width=\"" << W - 2 * margin
        << "\" height=\"" << H - 2 * margin
        << "\" fill=\"none\" stroke=\"#888\" stroke-width=\"1\"/>\n";

    if (!title.empty())
        out << "<text x=\"" << W / 2 << "\" y=\"" << margin - 14
            << "\" text-anchor=\"middle\" font-family=\"sans-serif\" font-size=\"15\">"
            << title << "</text>\n";

    // corner coordinates of the data box
    out << "<text x=\"" << margin << "\" y=\"" << H - margin + 16
        << "\" font-family=\"sans-serif\" font-size=\"11\" fill=\"#555\">(" << num(box.x0)
        << ", " << num(box.y0) << ")</text>\n";
    out << "<text x=\"" << W - margin << "\" y=\"" << margin - 6
        << "\" text-anchor=\"end\" font-family=\"sans-serif\" font-size=\"11\" "
           "fill=\"#555\">("
        << num(box.x1) << ", " << num(box.y1) << ")</text>\n";

    out << "<g fill=\"#1f77b4\" fill-opacity=\"0.55\">\n";
    for (long i = 0; i < source.rows(); ++i)
        out << "<circle cx=\"" << num(px(source(i, 0))) << "\" cy=\""
            << num(py(source(i, 1))) << "\" r=\"2.4\"/>\n";
    out << "</g>\n";

    out << "<g fill=\"#d62728\" fill-opacity=\"0.65\">\n";
    for (long i = 0; i < generated.rows(); ++i)
        out << "<circle cx=\"" << num(px(generated(i, 0))) << "\" cy=\""
            << num(py(generated(i, 1))) << "\" r=\"2.4\"/>\n";
    out << "</g>\n";

    // legend
    out << "<g font-family=\"sans-serif\" font-size=\"12\">\n";
    out << "<circle cx=\"" << margin + 12 << "\" cy=\"" << margin + 14
        << "\" r=\"4\" fill=\"#1f77b4\"/>";
    out << "<text x=\"" << margin + 22 << "\" y=\"" << margin + 18 << "\">source</text>\n";
    out << "<circle cx=\"" << margin + 12 << "\" cy=\"" << margin + 32
        << "\" r=\"4\" fill=\"#d62728\"/>";
    out << "<text x=\"" << margin + 22 << "\" y=\"" << margin + 36
        << "\">generated</text>\n";
    out << "</g>\n</svg>\n";
    out.flush();
    if (!out) throw io_error("write failed: " + path);
}

} // namespace driftflow
