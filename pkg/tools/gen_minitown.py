#!/usr/bin/env python3
"""Generate the minitown test fixtures (tests/data/minitown.{gml,osm}).

The layout is engineered so every downstream number is hand-checkable:

CityGML buildings (UTM32 offsets from E=691000, N=5334000, ground z=520):
  bldg1  ground [20,50]x[60,90]    h=34.2  roof 3100  2 roof faces  Stephansplatz 1
  bldg2  ground [20,40]x[10,26]    h=12.5  roof 3100  2 roof faces  Elisenstrasse 3
  bldg3  grounds [100,130]x[60,80] + garage [130,140]x[60,70]
                                   h=9.8   roof 1000  2 roof faces  Gartenweg 5
  bldg4  ground [120,150]x[15,35]  h=31.0  roof 1000  4 roof faces  Marktgasse 2
  bldg5  grounds [20,45]x[120,140] + annex [45,52]x[120,132]
                                   h=22.4  roof 2100  3 roof faces  Bahnhofstrasse 7
  bldg6  ground [50,70]x[60,90]    h=7.9   roof 1000  1 roof face   (no address)

OSM footprints:         relation result (threshold 0.5):
  W1 101 [20,50]x[60,90]      = bldg1 ground      -> 1:1
  W2 102 [21,41]x[10.5,26.5]  overlap 294.5/320   -> 1:1
  W3 103 [99,141]x[59,81]     covers both bldg3 grounds -> 1:n
  W4 104 [120,135]x[15,35] }  both on bldg4       -> m:1
  W5 105 [135,150]x[15,35] }
  W6 106 [20,36]x[120,140] }  with W7 over both bldg5 grounds -> m:n
  W7 107 [36,52]x[120,140] }
  W8 108 [160,180]x[60,80]    no partner           -> 1:0
bldg6 shares the x=50 wall with bldg1 and stays unmatched -> adjacent via W1.

POIs: 9501 hotel in W1, 9502 cafe in W2, 9503 bakery in W6, 9504 bench in
nothing.  Highway 150 'Elisenstrasse' runs along y=0; only bldg2 (10 m) and
bldg4 (15 m) grounds are inside its 20 m buffer.
"""

from pathlib import Path

from citykg.geometry import to_wgs84
from citykg.geometry.wkt import format_number as fnum

E0, N0, Z0 = 691000.0, 5334000.0, 520.0
ZONE = 32

OUT = Path(__file__).resolve().parent.parent / "tests" / "data"

BUILDINGS = [
    # gmlid, parts [(x1,y1,x2,y2)], height, roof code, roof strips per part, address
    ("bldg1", [(20, 60, 50, 90)], 34.2, "3100", [2], ("Stephansplatz", "1", "München")),
    ("bldg2", [(20, 10, 40, 26)], 12.5, "3100", [2], ("Elisenstraße", "3", "München")),
    ("bldg3", [(100, 60, 130, 80), (130, 60, 140, 70)], 9.8, "1000", [1, 1],
     ("Gartenweg", "5", "München")),
    ("bldg4", [(120, 15, 150, 35)], 31.0, "1000", [4], ("Marktgasse", "2", "München")),
    ("bldg5", [(20, 120, 45, 140), (45, 120, 52, 132)], 22.4, "2100", [2, 1],
     ("Bahnhofstraße", "7", "München")),
    ("bldg6", [(50, 60, 70, 90)], 7.9, "1000", [1], None),
]

WAYS = [
    (101, (20, 60, 50, 90), {"building": "yes"}),
    (102, (21, 10.5, 41, 26.5), {"building": "residential"}),
    (103, (99, 59, 141, 81), {"building": "yes"}),
    (104, (120, 15, 135, 35), {"building": "apartments"}),
    (105, (135, 15, 150, 35), {"building": "house"}),
    (106, (20, 120, 36, 140), {"building": "yes"}),
    (107, (36, 120, 52, 140), {"building": "yes"}),
    (108, (160, 60, 180, 80), {"building": "yes"}),
]

HIGHWAY = (150, [(0, 0), (100, 0), (200, 0)],
           {"highway": "secondary", "name": "Elisenstraße"})

POIS = [
    (9501, (35, 75), {"tourism": "hotel", "name": "Hotel Blauer Hirsch"}),
    (9502, (31, 18), {"amenity": "cafe", "name": "Café Altstadt"}),
    (9503, (30, 130), {"shop": "bakery", "name": "Backhaus Martin"}),
    (9504, (90, 45), {"amenity": "bench"}),
]


def poslist(coords3):
    return " ".join(f"{fnum(E0 + x)} {fnum(N0 + y)} {fnum(z)}" for x, y, z in coords3)


def polygon_xml(pid, coords3, indent):
    pad = " " * indent
    return (
        f'{pad}<gml:Polygon gml:id="{pid}">\n'
        f"{pad}  <gml:exterior><gml:LinearRing>\n"
        f'{pad}    <gml:posList srsDimension="3">{poslist(coords3)}</gml:posList>\n'
        f"{pad}  </gml:LinearRing></gml:exterior>\n"
        f"{pad}</gml:Polygon>\n"
    )


def surface_xml(kind, sid, pid, coords3):
    return (
        "      <bldg:boundedBy>\n"
        f'        <bldg:{kind} gml:id="{sid}">\n'
        "          <bldg:lod2MultiSurface><gml:MultiSurface>\n"
        "            <gml:surfaceMember>\n"
        + polygon_xml(pid, coords3, 14)
        + "            </gml:surfaceMember>\n"
        "          </gml:MultiSurface></bldg:lod2MultiSurface>\n"
        f"        </bldg:{kind}>\n"
        "      </bldg:boundedBy>\n"
    )


def building_faces(parts, height, strips):
    """(kind, local name, ring coords) per face; rings closed, z absolute."""
    z1 = Z0 + height
    faces = []
    for p, ((x1, y1, x2, y2), k) in enumerate(zip(parts, strips)):
        faces.append(("GroundSurface", f"p{p}_ground",
                      [(x1, y1, Z0), (x2, y1, Z0), (x2, y2, Z0), (x1, y2, Z0), (x1, y1, Z0)]))
        width = (x2 - x1) / k
        for s in range(k):
            sx1 = x1 + s * width
            sx2 = x1 + (s + 1) * width
            faces.append(("RoofSurface", f"p{p}_roof{s}",
                          [(sx1, y1, z1), (sx2, y1, z1), (sx2, y2, z1), (sx1, y2, z1), (sx1, y1, z1)]))
        corners = [(x1, y1), (x2, y1), (x2, y2), (x1, y2)]
        for w in range(4):
            ax, ay = corners[w]
            bx, by = corners[(w + 1) % 4]
            faces.append(("WallSurface", f"p{p}_wall{w}",
                          [(ax, ay, Z0), (bx, by, Z0), (bx, by, z1), (ax, ay, z1), (ax, ay, Z0)]))
    return faces


def gen_gml() -> str:
    out = [
        '<?xml version="1.0" encoding="UTF-8"?>\n'
        '<core:CityModel xmlns:core="http://www.opengis.net/citygml/2.0"\n'
        '    xmlns:bldg="http://www.opengis.net/citygml/building/2.0"\n'
        '    xmlns:gml="http://www.opengis.net/gml"\n'
        '    xmlns:xAL="urn:oasis:names:tc:ciq:xsdschema:xAL:2.0"\n'
        '    xmlns:xlink="http://www.w3.org/1999/xlink">\n'
        "  <gml:boundedBy>\n"
        '    <gml:Envelope srsName="EPSG:25832" srsDimension="3">\n'
        f"      <gml:lowerCorner>{fnum(E0)} {fnum(N0)} {fnum(Z0)}</gml:lowerCorner>\n"
        f"      <gml:upperCorner>{fnum(E0 + 200)} {fnum(N0 + 150)} {fnum(Z0 + 40)}</gml:upperCorner>\n"
        "    </gml:Envelope>\n"
        "  </gml:boundedBy>\n"
    ]
    for gmlid, parts, height, roof, strips, address in BUILDINGS:
        faces = building_faces(parts, height, strips)
        out.append("  <core:cityObjectMember>\n")
        out.append(f'    <bldg:Building gml:id="{gmlid}">\n')
        out.append(f'      <bldg:measuredHeight uom="#m">{height}</bldg:measuredHeight>\n')
        out.append(f"      <bldg:roofType>{roof}</bldg:roofType>\n")
        out.append("      <bldg:lod2Solid>\n"
                   "        <gml:Solid><gml:exterior><gml:CompositeSurface>\n")
        for _, name, _ in faces:
            out.append(f'          <gml:surfaceMember xlink:href="#poly_{gmlid}_{name}"/>\n')
        out.append("        </gml:CompositeSurface></gml:exterior></gml:Solid>\n"
                   "      </bldg:lod2Solid>\n")
        for kind, name, ring in faces:
            out.append(surface_xml(kind, f"{gmlid}_{name}", f"poly_{gmlid}_{name}", ring))
        if address is not None:
            street, number, city = address
            out.append(
                "      <bldg:address><core:Address><core:xalAddress>\n"
                "        <xAL:AddressDetails><xAL:Country>\n"
                "          <xAL:CountryName>Germany</xAL:CountryName>\n"
                '          <xAL:Locality Type="City">\n'
                f"            <xAL:LocalityName>{city}</xAL:LocalityName>\n"
                '            <xAL:Thoroughfare Type="Street">\n'
                f"              <xAL:ThoroughfareName>{street}</xAL:ThoroughfareName>\n"
                f"              <xAL:ThoroughfareNumber>{number}</xAL:ThoroughfareNumber>\n"
                "            </xAL:Thoroughfare>\n"
                "          </xAL:Locality>\n"
                "        </xAL:Country></xAL:AddressDetails>\n"
                "      </core:xalAddress></core:Address></bldg:address>\n"
            )
        out.append("    </bldg:Building>\n  </core:cityObjectMember>\n")
    out.append("</core:CityModel>\n")
    return "".join(out)


def lonlat(x, y):
    return to_wgs84(E0 + x, N0 + y, ZONE)


def gen_osm() -> str:
    out = ['<?xml version="1.0" encoding="UTF-8"?>\n<osm version="0.6" generator="minitown">\n']
    next_node = 9000
    way_nodes = {}
    for wid, (x1, y1, x2, y2), _tags in WAYS:
        ids = []
        for x, y in [(x1, y1), (x2, y1), (x2, y2), (x1, y2)]:
            lon, lat = lonlat(x, y)
            out.append(f'  <node id="{next_node}" lat="{lat!r}" lon="{lon!r}"/>\n')
            ids.append(next_node)
            next_node += 1
        way_nodes[wid] = ids + [ids[0]]
    hw_ids = []
    for x, y in HIGHWAY[1]:
        lon, lat = lonlat(x, y)
        out.append(f'  <node id="{next_node}" lat="{lat!r}" lon="{lon!r}"/>\n')
        hw_ids.append(next_node)
        next_node += 1
    for nid, (x, y), tags in POIS:
        lon, lat = lonlat(x, y)
        out.append(f'  <node id="{nid}" lat="{lat!r}" lon="{lon!r}">\n')
        for k, v in tags.items():
            out.append(f'    <tag k="{k}" v="{v}"/>\n')
        out.append("  </node>\n")
    for wid, _bbox, tags in WAYS:
        out.append(f'  <way id="{wid}">\n')
        for ref in way_nodes[wid]:
            out.append(f'    <nd ref="{ref}"/>\n')
        for k, v in tags.items():
            out.append(f'    <tag k="{k}" v="{v}"/>\n')
        out.append("  </way>\n")
    out.append(f'  <way id="{HIGHWAY[0]}">\n')
    for ref in hw_ids:
        out.append(f'    <nd ref="{ref}"/>\n')
    for k, v in HIGHWAY[2].items():
        out.append(f'    <tag k="{k}" v="{v}"/>\n')
    out.append("  </way>\n</osm>\n")
    return "".join(out)


if __name__ == "__main__":
    OUT.mkdir(parents=True, exist_ok=True)
    (OUT / "minitown.gml").write_text(gen_gml(), encoding="utf-8")
    (OUT / "minitown.osm").write_text(gen_osm(), encoding="utf-8")
    print(f"wrote {OUT / 'minitown.gml'}")
    print(f"wrote {OUT / 'minitown.osm'}")
