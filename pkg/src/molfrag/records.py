"""Line-delimited record schemas shared by the CLI and external consumers.

Decomposition record (one JSON object per molecule):
  {id, scheme, motifs: [{key, smiles, atoms: [int]}], singles: [int],
   inter_bonds: [[u, v, order]]}
Atom indices reference the parse order of the input SMILES. Motif keys are
hex-encoded canonical keys.

Molecule record:
  {id, smiles, atoms: [{element, charge}], bonds: [[u, v, order]]}
"""

import json

from .molgraph import write_smiles


def decomposition_record(mol_id, decomposition):
    motifs = []
    for frag, key in decomposition.motifs:
        motifs.append(
            {
                "key": key.hex(),
                "smiles": write_smiles(frag.to_molecule()),
                "atoms": list(frag.atom_indices),
            }
        )
    return {
        "id": mol_id,
        "scheme": decomposition.scheme,
        "motifs": motifs,
        "singles": [f.atom_indices[0] for f in decomposition.singles],
        "inter_bonds": [
            [b.u, b.v, b.order] for b in decomposition.inter_bonds
        ],
    }


def molecule_record(mol_id, mol):
    return {
        "id": mol_id,
        "smiles": write_smiles(mol),
        "atoms": [
            {"element": a.element, "charge": a.formal_charge} for a in mol.atoms
        ],
        "bonds": [[b.u, b.v, b.order] for b in mol.bonds],
    }


def dump_record(record):
    return json.dumps(record, sort_keys=True, separators=(",", ":"))


def header_line(format_version, fingerprint, **extra):
    payload = {"format_version": format_version, "config_fingerprint": fingerprint}
    payload.update(extra)
    return "# " + json.dumps(payload, sort_keys=True)
