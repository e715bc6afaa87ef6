import pytest

PROJECT_HEADER = (
    "id,model,trials,seed,stopAt,nodes,graph,outputs,"
    "graph.width,graph.height,graph.periodic,graph.neighborhood,model.temptation"
)

FIG5_ROW = (
    'pd1,prisonersDilemma,1,0,1000,"same(9801; strategy=0) | set(4900: strategy=1)",'
    "squareGrid,freq(strategy),99,99,true,vonNeumann,1.8"
)


def grid_project(
    exp_id="e1",
    width=5,
    height=5,
    periodic=True,
    temptation=1.8,
    nodes=None,
    stop_at=10,
    trials=1,
    seed=0,
    outputs="freq(strategy)",
):
    n = width * height
    nodes = nodes if nodes is not None else f"same({n}; strategy=0)"
    periodic_s = "true" if periodic else "false"
    return (
        f'{exp_id},prisonersDilemma,{trials},{seed},{stop_at},"{nodes}",squareGrid,'
        f'"{outputs}",{width},{height},{periodic_s},vonNeumann,{temptation}'
    )


def project_text(*rows):
    return "\n".join([PROJECT_HEADER, *rows]) + "\n"


@pytest.fixture
def fig5_csv():
    return project_text(FIG5_ROW)
