"""Pipeline texts exercising every operation form the DSL accepts.

The corpus mixes full multi-step pipelines with single-operation texts
covering each documented argument shape (directives, conditions, class
terms, relation queries, comparators with backtrace steps, ranges,
variable and attribute assignments, production kinds, log targets).
"""

PIPELINES = [
    # multi-step pipelines
    "filter(volume > 0.4) | pick(left AND above) | log()",
    "filter(id == 'user') | pick(disjoint) | sort(disjoint.delta <) | slice(1)",
    "deduce(topology) | filter(id == 'user') | pick(ahead AND left AND disjoint)"
    " | filter(type == 'picture') | sort(disjoint.delta > -2) | slice(2)",
    "filter(height < 0.6 && height > 0.25 && width > 1.5 && length > 1.8)"
    " | map(type = 'double bed'; confidence = 0.5)",
    "filter(height > 1.5 && width > 1.0 && depth > 0.4)"
    " | select(backside ? type == 'wall')"
    " | map(type = 'cabinet'; confidence = 0.75)",
    "filter(id == '1234') | produce(copy : label = 'copy'; y = 2.0)",
    "filter(type == 'wall') | produce(group : label = 'room')",
    "filter(type == 'wall') | produce(by : label = 'corner'; h = 0.02)",
    # attribute filters
    "filter(id == 'id1234')",
    "filter(virtual AND NOT moving)",
    "filter(label == 'table' AND confidence.label > 0.7)",
    "filter((type == 'chair' OR type == 'table'))",
    "filter(footprint > 0.5 && height > 1.5)",
    "filter(id == 'wall2')",
    "filter(width > 0.5 AND height < 2.4)",
    "filter(type == 'chair')",
    "filter(long)",
    "filter(thin AND volume > 0.4)",
    # adjust directives
    "adjust(max gap 0.05)",
    "adjust(sector fixed 1.2)",
    "adjust(nearby dimension 2.0)",
    "adjust(long ratio 4.0)",
    "adjust(nearby limit 4.0; max gap 0.1)",
    # deduce categories
    "deduce(topology)",
    "deduce(visibility comparability)",
    "deduce(topology visibility similarity)",
    # taxonomy checks
    "isa(furniture)",
    "isa('Bed')",
    "isa(Furniture)",
    "isa(Computer OR Monitor)",
    # relation queries
    "pick(near AND (left OR behind))",
    "pick(near)",
    "pick(ahead AND smaller)",
    "pick(near AND (left OR right))",
    "select(opposite)",
    "select(ontop ? label == 'table')",
    "select(on ? type == 'floor')",
    "select(ahead AND smaller ? footprint < 0.5)",
    # ordering and slicing
    "sort(width)",
    "sort(volume <)",
    "sort(volume >)",
    "sort(near.delta)",
    "sort(frontside.angle <)",
    "sort(disjoint.delta > -2)",
    "sort(disjoint.delta > 2)",
    "slice(1)",
    "slice(2..3)",
    "slice(-1)",
    # variables and attribute rewriting
    "calc(cnt = count(objects))",
    "calc(vol = objects[0].volume)",
    "calc(maxvol = max(objects.volume))",
    "map(shape = 'cylindrical')",
    "map(type = 'bed'; shape = 'cubical')",
    "map(weight = volume * 140.0)",
    # production rules
    "produce(copy : id = 'copy'; y = 2.0)",
    "produce(group : type = 'room')",
    "produce(on : label = 'zone')",
    "produce(by : label = 'corner'; h = 0.02)",
    "produce(al : label = 'ahead-left')",
    # pipeline control
    "backtrace(-2)",
    "reload()",
    "halt()",
    # logging
    "log(3D)",
    "log(base)",
    "log(on at by in)",
    "log(3D near left right)",
    "log(3D near right)",
    "log(left right seenleft seenright)",
]
