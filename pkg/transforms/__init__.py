from transforms.contourlet import ContourletTransform, SubbandSet, ct_decompose, ct_reconstruct, dump_subbands
from transforms.dct import dct2, idct2
from transforms.dfb import DirectionalFilterBank, dfb_decompose, dfb_reconstruct
from transforms.laplacian import LaplacianPyramid, lp_decompose, lp_reconstruct
