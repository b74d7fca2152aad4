#include "xvem/mesh.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <map>
#include <sstream>

#include "xvem/errors.hpp"

namespace xvem {

namespace {

std::vector<Point2> polygon_of(const std::vector<Vertex>& vertices, const std::vector<int>& ids)
{
    std::vector<Point2> poly;
    poly.reserve(ids.size());
    for (int v : ids)
        poly.push_back(vertices[v].position);
    return poly;
}

} // namespace

Mesh Mesh::from_polygons(std::vector<Point2> points, std::vector<std::vector<int>> cells,
                         bool fix_orientation)
{
    Mesh m;
    m.vertices_.resize(points.size());
    for (std::size_t i = 0; i < points.size(); ++i) {
        m.vertices_[i].id = static_cast<int>(i);
        m.vertices_[i].position = points[i];
    }

    std::map<std::pair<int, int>, int> edge_index;
    m.elements_.resize(cells.size());
    for (std::size_t p = 0; p < cells.size(); ++p) {
        auto& ids = cells[p];
        for (int v : ids)
            if (v < 0 || v >= static_cast<int>(points.size()))
                throw MeshError("element " + std::to_string(p) + " references unknown vertex " + std::to_string(v));
        if (fix_orientation && signed_area(polygon_of(m.vertices_, ids)) < 0.0)
            std::reverse(ids.begin(), ids.end());

        Element& el = m.elements_[p];
        el.id = static_cast<int>(p);
        el.vertex_ids = ids;
        const std::size_t n = ids.size();
        for (std::size_t i = 0; i < n; ++i) {
            const int a = ids[i];
            const int b = ids[(i + 1) % n];
            const auto key = std::minmax(a, b);
            auto [it, inserted] = edge_index.try_emplace({key.first, key.second}, static_cast<int>(m.edges_.size()));
            if (inserted) {
                Edge e;
                e.id = it->second;
                e.vertex_ids = {a, b};
                m.edges_.push_back(e);
            }
            m.edges_[it->second].elements.push_back(el.id);
            el.edge_ids.push_back(it->second);
        }
    }
    m.finalize();
    return m;
}

Mesh Mesh::from_explicit(std::vector<Point2> points, std::vector<std::array<int, 2>> edges,
                         std::vector<std::vector<int>> cells)
{
    Mesh m;
    m.vertices_.resize(points.size());
    for (std::size_t i = 0; i < points.size(); ++i) {
        m.vertices_[i].id = static_cast<int>(i);
        m.vertices_[i].position = points[i];
    }
    std::map<std::pair<int, int>, int> edge_index;
    m.edges_.resize(edges.size());
    for (std::size_t e = 0; e < edges.size(); ++e) {
        const auto [a, b] = edges[e];
        if (a < 0 || b < 0 || a >= static_cast<int>(points.size()) || b >= static_cast<int>(points.size()))
            throw MeshError("edge " + std::to_string(e) + " references an unknown vertex");
        m.edges_[e].id = static_cast<int>(e);
        m.edges_[e].vertex_ids = {a, b};
        const auto key = std::minmax(a, b);
        if (!edge_index.try_emplace({key.first, key.second}, static_cast<int>(e)).second)
            throw MeshError("edge " + std::to_string(e) + " duplicates another edge");
    }

    m.elements_.resize(cells.size());
    for (std::size_t p = 0; p < cells.size(); ++p) {
        auto& ids = cells[p];
        for (int v : ids)
            if (v < 0 || v >= static_cast<int>(points.size()))
                throw MeshError("element " + std::to_string(p) + " references unknown vertex " + std::to_string(v));
        if (signed_area(polygon_of(m.vertices_, ids)) < 0.0)
            std::reverse(ids.begin(), ids.end());
        Element& el = m.elements_[p];
        el.id = static_cast<int>(p);
        el.vertex_ids = ids;
        const std::size_t n = ids.size();
        for (std::size_t i = 0; i < n; ++i) {
            const auto key = std::minmax(ids[i], ids[(i + 1) % n]);
            auto it = edge_index.find({key.first, key.second});
            if (it == edge_index.end())
                throw MeshError("element " + std::to_string(p) + " uses an edge that is not listed");
            m.edges_[it->second].elements.push_back(el.id);
            el.edge_ids.push_back(it->second);
        }
    }
    m.finalize();
    return m;
}

void Mesh::finalize()
{
    h_ = 0.0;
    for (auto& el : elements_) {
        const auto poly = polygon_of(vertices_, el.vertex_ids);
        const PolygonGeometry g = element_geometry(poly);
        el.area = g.area;
        el.centroid = g.centroid;
        el.diameter = g.diameter;
        const auto kp = find_kernel_point(poly);
        el.interior_point = kp ? kp->point : g.centroid;
        h_ = std::max(h_, el.diameter);
    }
    for (auto& e : edges_) {
        const Point2& a = vertices_[e.vertex_ids[0]].position;
        const Point2& b = vertices_[e.vertex_ids[1]].position;
        e.length = (b - a).norm();
        e.midpoint = 0.5 * (a + b);
        e.on_boundary = e.elements.size() == 1;
        if (e.on_boundary) {
            vertices_[e.vertex_ids[0]].on_boundary = true;
            vertices_[e.vertex_ids[1]].on_boundary = true;
        }
    }
    vertex_elements_.assign(vertices_.size(), {});
    for (const auto& el : elements_)
        for (int v : el.vertex_ids)
            vertex_elements_[v].push_back(el.id);
}

double Mesh::total_area() const
{
    double a = 0.0;
    for (const auto& el : elements_)
        a += el.area;
    return a;
}

std::vector<Point2> Mesh::element_polygon(int p) const
{
    return polygon_of(vertices_, elements_[p].vertex_ids);
}

Vec2 Mesh::element_edge_normal(int p, int local_edge) const
{
    const auto& ids = elements_[p].vertex_ids;
    const std::size_t n = ids.size();
    return outward_normal(vertices_[ids[local_edge]].position, vertices_[ids[(local_edge + 1) % n]].position);
}

bool Mesh::edge_aligned(int p, int local_edge) const
{
    const auto& el = elements_[p];
    return edges_[el.edge_ids[local_edge]].vertex_ids[0] == el.vertex_ids[local_edge];
}

MeshQuality validate_mesh(const Mesh& mesh)
{
    MeshQuality q;
    const auto& vs = mesh.vertices();
    const auto& es = mesh.edges();
    const auto& els = mesh.elements();

    for (std::size_t i = 0; i < vs.size(); ++i) {
        if (vs[i].id != static_cast<int>(i))
            throw MeshError("vertex " + std::to_string(i) + ": ids are not dense");
        if (!vs[i].position.allFinite())
            throw MeshError("vertex " + std::to_string(i) + ": non-finite position");
    }

    for (std::size_t e = 0; e < es.size(); ++e) {
        const Edge& ed = es[e];
        const std::string tag = "edge " + std::to_string(e) + ": ";
        if (ed.id != static_cast<int>(e))
            throw MeshError(tag + "ids are not dense");
        if (ed.vertex_ids[0] == ed.vertex_ids[1])
            throw MeshError(tag + "repeated vertex");
        if (!(ed.length > 0.0))
            throw MeshError(tag + "zero length");
        if (ed.elements.empty() || ed.elements.size() > 2)
            throw MeshError(tag + "must be adjacent to one or two elements, has " + std::to_string(ed.elements.size()));
        if (ed.on_boundary != (ed.elements.size() == 1))
            throw MeshError(tag + "boundary flag inconsistent with adjacency");
        for (int p : ed.elements) {
            const auto& ids = els[p].edge_ids;
            if (std::find(ids.begin(), ids.end(), ed.id) == ids.end())
                throw MeshError(tag + "lists element " + std::to_string(p) + " which does not list it");
        }
    }

    double hmax = 0.0;
    q.star_ratio.resize(els.size());
    q.edge_ratio.resize(els.size());
    q.min_star_ratio = 1.0;
    q.min_edge_ratio = 1.0;
    for (std::size_t p = 0; p < els.size(); ++p) {
        const Element& el = els[p];
        const std::string tag = "element " + std::to_string(p) + ": ";
        const auto poly = mesh.element_polygon(static_cast<int>(p));
        if (poly.size() < 3)
            throw MeshError(tag + "fewer than 3 vertices");
        const double a = signed_area(poly);
        if (!(a > 0.0))
            throw MeshError(tag + "vertices are not in counterclockwise order (signed area " + std::to_string(a) + ")");
        if (!is_simple_polygon(poly))
            throw MeshError(tag + "polygon is not simple");
        if (el.edge_ids.size() != el.vertex_ids.size())
            throw MeshError(tag + "edge cycle length differs from vertex cycle length");
        const std::size_t n = el.vertex_ids.size();
        double min_edge = std::numeric_limits<double>::infinity();
        for (std::size_t i = 0; i < n; ++i) {
            const Edge& ed = es[el.edge_ids[i]];
            const auto key = std::minmax(el.vertex_ids[i], el.vertex_ids[(i + 1) % n]);
            if (std::minmax(ed.vertex_ids[0], ed.vertex_ids[1]) != key)
                throw MeshError(tag + "edge cycle inconsistent with vertex cycle at position " + std::to_string(i));
            if (std::find(ed.elements.begin(), ed.elements.end(), el.id) == ed.elements.end())
                throw MeshError(tag + "lists edge " + std::to_string(ed.id) + " which does not list it");
            min_edge = std::min(min_edge, ed.length);
        }
        const auto kp = find_kernel_point(poly);
        if (!kp)
            throw MeshError(tag + "not star-shaped with respect to any ball");
        q.star_ratio[p] = std::min(1.0, kp->max_radius / el.diameter);
        q.edge_ratio[p] = min_edge / el.diameter;
        q.min_star_ratio = std::min(q.min_star_ratio, q.star_ratio[p]);
        q.min_edge_ratio = std::min(q.min_edge_ratio, q.edge_ratio[p]);
        q.area += el.area;
        hmax = std::max(hmax, el.diameter);
    }
    if (std::abs(hmax - mesh.h()) > 1e-14 * hmax)
        throw MeshError("mesh size differs from the max element diameter");
    return q;
}

// ---------------------------------------------------------------------------
// Text format

namespace {

bool next_data_line(std::istream& in, std::string& line)
{
    while (std::getline(in, line)) {
        const auto pos = line.find_first_not_of(" \t\r");
        if (pos == std::string::npos || line[pos] == '#')
            continue;
        return true;
    }
    return false;
}

std::size_t read_header(std::istream& in, const std::string& keyword)
{
    std::string line;
    if (!next_data_line(in, line))
        throw MeshError("mesh file: missing '" + keyword + "' header");
    std::istringstream ss(line);
    std::string word;
    long long count = -1;
    ss >> word >> count;
    if (word != keyword || count < 0)
        throw MeshError("mesh file: expected '" + keyword + " <count>', got '" + line + "'");
    return static_cast<std::size_t>(count);
}

} // namespace

Mesh read_mesh(std::istream& in)
{
    std::string line;
    const std::size_t nv = read_header(in, "vertices");
    std::vector<Point2> points(nv);
    std::vector<bool> seen(nv, false);
    for (std::size_t i = 0; i < nv; ++i) {
        if (!next_data_line(in, line))
            throw MeshError("mesh file: truncated vertex section");
        std::istringstream ss(line);
        long long id;
        double x, y;
        if (!(ss >> id >> x >> y) || id < 0 || static_cast<std::size_t>(id) >= nv || seen[id])
            throw MeshError("mesh file: bad vertex line '" + line + "'");
        seen[id] = true;
        points[id] = Point2(x, y);
    }

    const std::size_t ne = read_header(in, "edges");
    std::vector<std::array<int, 2>> edges(ne);
    seen.assign(ne, false);
    for (std::size_t i = 0; i < ne; ++i) {
        if (!next_data_line(in, line))
            throw MeshError("mesh file: truncated edge section");
        std::istringstream ss(line);
        long long id;
        int a, b;
        if (!(ss >> id >> a >> b) || id < 0 || static_cast<std::size_t>(id) >= ne || seen[id])
            throw MeshError("mesh file: bad edge line '" + line + "'");
        seen[id] = true;
        edges[id] = {a, b};
    }

    const std::size_t nc = read_header(in, "elements");
    std::vector<std::vector<int>> cells(nc);
    seen.assign(nc, false);
    for (std::size_t i = 0; i < nc; ++i) {
        if (!next_data_line(in, line))
            throw MeshError("mesh file: truncated element section");
        std::istringstream ss(line);
        long long id;
        if (!(ss >> id) || id < 0 || static_cast<std::size_t>(id) >= nc || seen[id])
            throw MeshError("mesh file: bad element line '" + line + "'");
        seen[id] = true;
        int v;
        while (ss >> v)
            cells[id].push_back(v);
        if (cells[id].size() < 3)
            throw MeshError("mesh file: element " + std::to_string(id) + " has fewer than 3 vertices");
    }
    return Mesh::from_explicit(std::move(points), std::move(edges), std::move(cells));
}

Mesh read_mesh_file(const std::string& path)
{
    std::ifstream in(path);
    if (!in)
        throw MeshError("cannot open mesh file " + path);
    return read_mesh(in);
}

void write_mesh(std::ostream& out, const Mesh& mesh)
{
    std::ostringstream ss;
    ss.precision(17);
    ss << "vertices " << mesh.n_vertices() << '\n';
    for (const auto& v : mesh.vertices())
        ss << v.id << ' ' << v.position.x() << ' ' << v.position.y() << '\n';
    ss << "edges " << mesh.n_edges() << '\n';
    for (const auto& e : mesh.edges())
        ss << e.id << ' ' << e.vertex_ids[0] << ' ' << e.vertex_ids[1] << '\n';
    ss << "elements " << mesh.n_elements() << '\n';
    for (const auto& el : mesh.elements()) {
        ss << el.id;
        for (int v : el.vertex_ids)
            ss << ' ' << v;
        ss << '\n';
    }
    out << ss.str();
}

void write_mesh_file(const std::string& path, const Mesh& mesh)
{
    std::ofstream out(path);
    if (!out)
        throw MeshError("cannot write mesh file " + path);
    write_mesh(out, mesh);
}

} // namespace xvem
