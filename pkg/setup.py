from setuptools import setup

setup(
   name='AlgebraicArcQueries',
   version='0.0a0',
   description='Exact range searching, intersection counting and ray shooting over algebraic arcs.',
   license="GNU",
   packages=['AlgebraicArcQueries'],  #same as name
   install_requires=['numpy', 'scipy', 'sympy', 'networkx', 'matplotlib', 'pytest'], #external packages as dependencies
   entry_points={'console_scripts': ['arcqueries=AlgebraicArcQueries.CommandLine:main']}
)
