"""Score a handful of molecules with every 2D module and rank them by reward."""

from molforge.orchestrator import rank
from molforge.scoring2d import ScoringContext, evaluate

MOLS = {
    "paracetamol": "CC(=O)Nc1ccc(O)cc1",
    "ibuprofen": "CC(C)Cc1ccc(cc1)C(C)C(=O)O",
    "imatinib-like": "Cc1ccc(NC(=O)c2ccc(CN3CCN(C)CC3)cc2)cc1Nc1nccc(-c2cccnc2)n1",
    "quinone (flagged)": "O=C1C=CC(=O)C=C1",
    "long alkane": "CCCCCCCCCCCCCCCCCCCC",
}

ctx = ScoringContext()
reports = {evaluate(s, ctx).canonical_smiles: name for name, s in MOLS.items()}
ranked = rank([evaluate(s, ctx) for s in MOLS.values()])
print(f"{'name':20s} {'reward':>7s} {'gate':>10s} {'ro5 viol':>8s} {'rersa':>6s} {'mce18':>6s}")
for r in ranked:
    name = reports[r.canonical_smiles]
    rersa = f"{r.rersa:.2f}" if r.rersa is not None else "-"
    mce = f"{r.mce18:.1f}" if r.mce18 is not None else "-"
    print(f"{name:20s} {r.reward:7.3f} {str(r.gate or 'passed'):>10s} {r.ro5_violations!s:>8s} {rersa:>6s} {mce:>6s}")
